use num_bigint::BigInt;

use ricci_core::rootfind::certificates::{certificate_check, default_grid, CertificateName, SignCertificate};
use ricci_core::Error;

fn load(name: CertificateName) -> SignCertificate {
    SignCertificate::load(name).unwrap()
}

fn value(c: &SignCertificate, params: &[i64], at: usize) -> BigInt {
    let r = certificate_check(c, params).unwrap();
    r.values[at].1.parse().unwrap()
}

#[test]
fn h_at_zero_and_one_match_closed_forms() {
    let h = load(CertificateName::H);
    for (k, m) in [(3i64, 3i64), (5, 3), (8, 10), (30, 30), (12, 25)] {
        let (kb, mb) = (BigInt::from(k), BigInt::from(m));
        let h0 = 8 * &kb * &kb * mb.pow(3) + 12 * &kb * mb.pow(4) - 8 * &kb * mb.pow(3) + 4 * mb.pow(5) - 4 * mb.pow(4);
        let h1 = &mb * (&kb - &mb) * (2 * &kb + &mb) * (&kb + &mb - BigInt::from(2)).pow(2u32);
        assert_eq!(value(&h, &[k, m], 0), h0);
        assert_eq!(value(&h, &[k, m], 1), h1);
    }
}

#[test]
fn h_sign_pattern_needs_k_below_m() {
    let h = load(CertificateName::H);
    assert_eq!(certificate_check(&h, &[3, 3]).unwrap().signs, vec![1, 0, 1]);
    assert_eq!(certificate_check(&h, &[5, 3]).unwrap().signs, vec![1, 1, 1]);
    for (k, m) in [(7, 10), (8, 10), (9, 10), (20, 30)] {
        let r = certificate_check(&h, &[k, m]).unwrap();
        assert!(r.holds, "{:?}", r);
    }
}

#[test]
fn f_sample_values() {
    let f = load(CertificateName::F);
    for l in 2i64..=30 {
        let lb = BigInt::from(l);
        assert_eq!(value(&f, &[l], 1), -4 * &lb * &lb);
        let f4 = 972 * lb.pow(4) - 2700 * lb.pow(3) + 1799 * lb.pow(2) + 30 * &lb - 225;
        assert_eq!(value(&f, &[l], 2), f4);
        assert!(certificate_check(&f, &[l]).unwrap().holds);
    }
}

#[test]
fn f1_signs_on_grid() {
    let f1 = load(CertificateName::F1);
    for p in default_grid(CertificateName::F1) {
        assert_eq!(certificate_check(&f1, &p).unwrap().signs, vec![1, -1, 1], "{:?}", p);
    }
}

#[test]
fn alternating_certificates() {
    for name in [
        CertificateName::G,
        CertificateName::G4,
        CertificateName::F2,
        CertificateName::F3,
    ] {
        let c = load(name);
        assert!(c.symbolic_alternation(), "{}", name);
        for p in default_grid(name) {
            assert!(certificate_check(&c, &p).unwrap().holds, "{} {:?}", name, p);
        }
    }
}

#[test]
fn checksums() {
    let sum = |s: &str| s.parse::<BigInt>().unwrap();
    assert_eq!(load(CertificateName::G4).checksum(), (25, sum("12608")));
    assert_eq!(load(CertificateName::F2).checksum(), (88, sum("21637088787551727")));
    assert_eq!(
        load(CertificateName::F3).checksum(),
        (88, sum("3178008509595613599246256"))
    );
}

#[test]
fn constraints_are_enforced() {
    let cases: [(CertificateName, &[i64]); 5] = [
        (CertificateName::H, &[2, 2]),
        (CertificateName::H, &[4, 5]),
        (CertificateName::F, &[1]),
        (CertificateName::F1, &[5]),
        (CertificateName::G4, &[1]),
    ];
    for (name, p) in cases {
        assert!(
            matches!(certificate_check(&load(name), p), Err(Error::ConstraintViolation(_))),
            "{} {:?}",
            name,
            p
        );
    }
    assert!(matches!(
        certificate_check(&load(CertificateName::F), &[2, 3]),
        Err(Error::DimensionMismatch { .. })
    ));
}
