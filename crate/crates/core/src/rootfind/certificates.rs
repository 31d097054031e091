//! Univariate elimination polynomials with integer coefficients in their
//! parameters, and the sign claims that bound their positive root counts.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{qi, MultiPoly, Parser, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CertificateName {
    /// `SO(k+2m)/SO(k)xSO(m)xSO(m)`, eliminant in `z_2`.
    H,
    /// Same space, eliminant in `z_1`, written in `u = m - 3`.
    G,
    /// `SU(2l)/U(l)`, eliminant in `z_1`.
    F,
    /// `SU(2l)/U(l)`, eliminant in `z_2`, written in `u = l - 2`.
    G4,
    /// Stiefel block with `k2 = k3`, eliminant in `z_1`.
    F1,
    /// Stiefel block with `k2 = k3`, eliminant in `z_2`, written in `u = k2 - 6`.
    F2,
    /// Stiefel block with `k2 = k3`, eliminant in `z_3`, written in `u = k2 - 6`.
    F3,
}

impl CertificateName {
    pub const ALL: [CertificateName; 7] = [
        CertificateName::H,
        CertificateName::G,
        CertificateName::F,
        CertificateName::G4,
        CertificateName::F1,
        CertificateName::F2,
        CertificateName::F3,
    ];
}

impl fmt::Display for CertificateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// What the certificate is claimed to satisfy.
#[derive(Clone, Debug, PartialEq)]
pub enum Claim {
    /// Signs at the listed sample points of the variable.
    SignsAt { points: Vec<Q>, signs: Vec<i8> },
    /// Coefficients of even powers of the variable positive, odd powers negative.
    Alternating,
}

#[derive(Clone, Debug)]
pub struct SignCertificate {
    pub name: CertificateName,
    pub variable: &'static str,
    /// Public parameter names, in the order `certificate_check` expects values.
    pub params: &'static [&'static str],
    /// Polynomial in `[variable, internal parameters..]`.
    pub poly: MultiPoly,
    pub claim: Claim,
    internal: fn(&[i64]) -> Vec<i64>,
    constraint: fn(&[i64]) -> std::result::Result<(), String>,
}

fn load(src: &str, vars: &[&str]) -> MultiPoly {
    Parser::new(vars).parse(src).expect("certificate text parses")
}

fn sign_points(points: &[i64], signs: &[i8]) -> Claim {
    Claim::SignsAt {
        points: points.iter().map(|&p| qi(p)).collect(),
        signs: signs.to_vec(),
    }
}

impl SignCertificate {
    pub fn load(name: CertificateName) -> Result<Self> {
        use CertificateName::*;
        let cert = match name {
            H => SignCertificate {
                name,
                variable: "z2",
                params: &["k", "m"],
                poly: load(include_str!("../../data/cert_h.txt"), &["z2", "k", "m"]),
                claim: sign_points(&[0, 1, 2], &[1, -1, 1]),
                internal: |p| p.to_vec(),
                constraint: |p| {
                    let (k, m) = (p[0], p[1]);
                    if k < 1 || m <= 2 || k * k <= 4 * (m - 1) {
                        return Err(format!("need k >= 1, m > 2, k^2 > 4(m-1); got k={}, m={}", k, m));
                    }
                    Ok(())
                },
            },
            G => SignCertificate {
                name,
                variable: "z1",
                params: &["k", "m"],
                poly: load(include_str!("../../data/cert_g.txt"), &["z1", "k", "u"]),
                claim: Claim::Alternating,
                internal: |p| vec![p[0], p[1] - 3],
                constraint: |p| {
                    if p[0] < 1 || p[1] < 3 {
                        return Err(format!("need k >= 1, m >= 3; got k={}, m={}", p[0], p[1]));
                    }
                    Ok(())
                },
            },
            F => SignCertificate {
                name,
                variable: "z1",
                params: &["l"],
                poly: load(include_str!("../../data/cert_f.txt"), &["z1", "l"]),
                claim: sign_points(&[0, 1, 4], &[1, -1, 1]),
                internal: |p| p.to_vec(),
                constraint: |p| {
                    if p[0] >= 2 {
                        Ok(())
                    } else {
                        Err(format!("need l >= 2; got l={}", p[0]))
                    }
                },
            },
            G4 => SignCertificate {
                name,
                variable: "z2",
                params: &["l"],
                poly: load(include_str!("../../data/cert_g4.txt"), &["z2", "u"]),
                claim: Claim::Alternating,
                internal: |p| vec![p[0] - 2],
                constraint: |p| {
                    if p[0] >= 2 {
                        Ok(())
                    } else {
                        Err(format!("need l >= 2; got l={}", p[0]))
                    }
                },
            },
            F1 => SignCertificate {
                name,
                variable: "z1",
                params: &["k2"],
                poly: load(include_str!("../../data/cert_f1.txt"), &["z1", "k2"]),
                claim: sign_points(&[1, 3, 6], &[1, -1, 1]),
                internal: |p| p.to_vec(),
                constraint: k2_at_least_six,
            },
            F2 | F3 => return Self::load_large(name),
        };
        Ok(cert)
    }

    #[cfg(feature = "large-certificates")]
    fn load_large(name: CertificateName) -> Result<Self> {
        let (src, var) = match name {
            CertificateName::F2 => (include_str!("../../data/cert_f2.txt"), "z2"),
            _ => (include_str!("../../data/cert_f3.txt"), "z3"),
        };
        Ok(SignCertificate {
            name,
            variable: var,
            params: &["k2"],
            poly: load(src, &[var, "u"]),
            claim: Claim::Alternating,
            internal: |p| vec![p[0] - 6],
            constraint: k2_at_least_six,
        })
    }

    #[cfg(not(feature = "large-certificates"))]
    fn load_large(name: CertificateName) -> Result<Self> {
        Err(Error::NotTranscribed(format!(
            "certificate {} (large-certificates feature)",
            name
        )))
    }

    /// Number of stored terms and the sum of absolute coefficient values.
    pub fn checksum(&self) -> (usize, BigInt) {
        let mut sum = BigInt::zero();
        for (_, c) in self.poly.terms() {
            debug_assert!(c.is_integer());
            sum += c.numer().abs();
        }
        (self.poly.len(), sum)
    }

    /// Whether every stored coefficient has sign `(-1)^j` on `variable^j`,
    /// which makes the claim hold for all nonnegative internal parameters.
    pub fn symbolic_alternation(&self) -> bool {
        self.poly.terms().all(|(m, c)| c.is_positive() == (m.0[0] % 2 == 0))
    }

    /// Univariate coefficients (index = power) at the given public parameters.
    pub fn instantiate(&self, params: &[i64]) -> Result<Vec<Q>> {
        if params.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                expected: self.params.len(),
                got: params.len(),
            });
        }
        (self.constraint)(params).map_err(Error::ConstraintViolation)?;
        let internal = (self.internal)(params);
        let mut values = vec![None];
        values.extend(internal.iter().map(|&v| Some(qi(v))));
        let p = self.poly.substitute(&values);
        let deg = p.degree().unwrap_or(0) as usize;
        let mut coeffs = vec![Q::zero(); deg + 1];
        for (m, c) in p.terms() {
            coeffs[m.0[0] as usize] += c;
        }
        Ok(coeffs)
    }
}

fn k2_at_least_six(p: &[i64]) -> std::result::Result<(), String> {
    if p[0] >= 6 {
        Ok(())
    } else {
        Err(format!("need k2 >= 6; got k2={}", p[0]))
    }
}

fn horner(coeffs: &[Q], x: &Q) -> Q {
    coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

fn sign(v: &Q) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignReport {
    pub name: CertificateName,
    pub params: Vec<(String, i64)>,
    /// `(sample point, exact value)` as decimal strings.
    pub values: Vec<(String, String)>,
    pub signs: Vec<i8>,
    pub expected: Vec<i8>,
    pub holds: bool,
}

/// Exact evaluation of a certificate's claim at one parameter assignment.
pub fn certificate_check(cert: &SignCertificate, params: &[i64]) -> Result<SignReport> {
    let coeffs = cert.instantiate(params)?;
    let (values, signs, expected) = match &cert.claim {
        Claim::SignsAt { points, signs: want } => {
            let vals: Vec<Q> = points.iter().map(|p| horner(&coeffs, p)).collect();
            (
                points
                    .iter()
                    .zip(&vals)
                    .map(|(p, v)| (p.to_string(), v.to_string()))
                    .collect(),
                vals.iter().map(sign).collect(),
                want.clone(),
            )
        }
        Claim::Alternating => (
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| (format!("coeff {}", j), c.to_string()))
                .collect(),
            coeffs.iter().map(sign).collect(),
            (0..coeffs.len()).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect(),
        ),
    };
    let holds = signs == expected;
    Ok(SignReport {
        name: cert.name,
        params: cert
            .params
            .iter()
            .map(|s| s.to_string())
            .zip(params.iter().copied())
            .collect(),
        values,
        signs,
        expected,
        holds,
    })
}

/// Parameter assignments covered by the default checks.
pub fn default_grid(name: CertificateName) -> Vec<Vec<i64>> {
    use CertificateName::*;
    match name {
        H | G => {
            let mut out = Vec::new();
            for m in 3..=30i64 {
                for k in 1..=30i64 {
                    if k * k > 4 * (m - 1) {
                        out.push(vec![k, m]);
                    }
                }
            }
            out
        }
        F | G4 => (2..=30).map(|l| vec![l]).collect(),
        F1 | F2 | F3 => (6..=20).map(|k| vec![k]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_at_one_is_minus_four_l_squared() {
        let c = SignCertificate::load(CertificateName::F).unwrap();
        for l in 2..6 {
            let coeffs = c.instantiate(&[l]).unwrap();
            assert_eq!(horner(&coeffs, &qi(1)), qi(-4 * l * l));
        }
    }

    #[test]
    fn h_constant_term() {
        // H(0) = 8k^2m^3 + 12km^4 - 8km^3 + 4m^5 - 4m^4
        let c = SignCertificate::load(CertificateName::H).unwrap();
        let (k, m) = (5i64, 4i64);
        let coeffs = c.instantiate(&[k, m]).unwrap();
        let expect = 8 * k * k * m.pow(3) + 12 * k * m.pow(4) - 8 * k * m.pow(3) + 4 * m.pow(5) - 4 * m.pow(4);
        assert_eq!(coeffs[0], qi(expect));
    }

    #[test]
    fn constraint_violation() {
        let c = SignCertificate::load(CertificateName::F1).unwrap();
        assert!(matches!(
            certificate_check(&c, &[5]),
            Err(Error::ConstraintViolation(_))
        ));
        let h = SignCertificate::load(CertificateName::H).unwrap();
        assert!(matches!(
            certificate_check(&h, &[2, 5]),
            Err(Error::ConstraintViolation(_))
        ));
    }

    #[test]
    fn f1_signs_at_six() {
        let c = SignCertificate::load(CertificateName::F1).unwrap();
        let r = certificate_check(&c, &[6]).unwrap();
        assert_eq!(r.signs, vec![1, -1, 1]);
        assert!(r.holds);
    }

    #[test]
    fn g4_checksum_and_alternation() {
        let c = SignCertificate::load(CertificateName::G4).unwrap();
        assert_eq!(c.checksum(), (25, BigInt::from(12608)));
        assert!(c.symbolic_alternation());
    }
}
