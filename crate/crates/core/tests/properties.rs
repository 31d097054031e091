use proptest::prelude::*;

use ricci_core::compactify::{chart_coords, compactified_field, Chart};
use ricci_core::curvature::{ricci_general, ricci_specialized, Metric};
use ricci_core::flowfield::{clearing_value, flow_rhs, oriented_system};
use ricci_core::poly::{decode_field, encode_field, q, qi, MultiPoly, Parser, PolyVectorField, Q};
use ricci_core::spaces::{catalog_lookup, FlagId, SpaceSpec};

fn any_space() -> impl Strategy<Value = SpaceSpec> {
    prop_oneof![
        (1u32..8, 1u32..8, 1u32..8).prop_map(|(k, l, m)| SpaceSpec::gws_klm(1, k, l, m)),
        (1u32..8, 1u32..8, 1u32..8).prop_map(|(k, l, m)| SpaceSpec::gws_klm(2, k, l, m)),
        (1u32..8, 1u32..8, 1u32..8).prop_map(|(k, l, m)| SpaceSpec::gws_klm(3, k, l, m)),
        (2u32..9).prop_map(|l| SpaceSpec::gws_l(4, l)),
        (4u32..9).prop_map(|l| SpaceSpec::gws_l(5, l)),
        (6u8..16).prop_map(SpaceSpec::gws),
        (3u32..30).prop_map(SpaceSpec::v2),
        (2u32..9, 1u32..9).prop_map(|(a, b)| SpaceSpec::stiefel(a, b)),
        prop::sample::select(FlagId::ALL.to_vec()).prop_map(SpaceSpec::flag),
    ]
}

fn metric(q: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, q).prop_map(|v| v.into_iter().map(f64::exp).collect())
}

fn space_and_metric() -> impl Strategy<Value = (SpaceSpec, Vec<f64>)> {
    any_space()
        .prop_filter("valid", |s| s.validate().is_ok())
        .prop_flat_map(|s| (Just(s), metric(s.q())))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn small_poly(nvars: usize, max_deg: u32) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, nvars), -6i64..=6, 1i64..=4), 1..6).prop_map(
        move |terms| {
            MultiPoly::from_terms(
                nvars,
                terms.into_iter().filter(|t| t.1 != 0).map(|(e, n, d)| (e, q(n, d))),
            )
        },
    )
}

fn small_field(nvars: usize, max_deg: u32) -> impl Strategy<Value = PolyVectorField> {
    prop::collection::vec(small_poly(nvars, max_deg), nvars).prop_map(PolyVectorField::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn specialized_ricci_matches_general((spec, x) in space_and_metric()) {
        let iso = catalog_lookup(&spec).unwrap();
        let g = Metric::new(x).unwrap();
        let a = ricci_specialized(&spec, &g).unwrap();
        let b = ricci_general(&iso, &g).unwrap();
        let norm = b.components.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (u, v) in a.components.iter().zip(&b.components) {
            prop_assert!((u - v).abs() / norm < 1e-12, "{} {} {}", spec, u, v);
        }
        let s_norm: f64 = iso.dims.iter().zip(&b.components).map(|(d, r)| *d as f64 * r.abs()).sum();
        prop_assert!((a.scalar - b.scalar).abs() / s_norm < 1e-12);
    }

    #[test]
    fn ricci_scales_inversely((spec, x) in space_and_metric(), c in 0.05f64..20.0) {
        let g = Metric::new(x).unwrap();
        let a = ricci_specialized(&spec, &g).unwrap();
        let b = ricci_specialized(&spec, &g.scaled(c).unwrap()).unwrap();
        let norm = a.components.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (u, v) in a.components.iter().zip(&b.components) {
            prop_assert!((u - c * v).abs() / norm < 1e-12);
        }
    }

    #[test]
    fn polynomial_field_is_positive_multiple_of_flow((spec, x) in space_and_metric()) {
        let iso = catalog_lookup(&spec).unwrap();
        let n = iso.n_dim() as f64;
        let v = flow_rhs(&iso, &Metric::new(x.clone()).unwrap(), n).unwrap();
        let p = oriented_system(&spec).unwrap().eval_f64(&x);
        let lam = clearing_value(&spec, &x).unwrap();
        prop_assert!(lam > 0.0);
        let scale = p.iter().map(|a| a.abs()).fold(0.0, f64::max).max(1e-300);
        for (a, b) in p.iter().zip(&v) {
            prop_assert!((a - lam * b).abs() / scale < 1e-9, "{} {:?} {:?}", spec, p, v);
        }
    }

    #[test]
    fn compactification_conjugates_the_field(
        f in small_field(3, 3),
        k in 1usize..=3,
        x in prop::collection::vec((1i64..9, 1i64..5), 3),
    ) {
        // p(phi(x)) = z_q^(d-1) Dphi(x) P(x) in chart U_k
        let d = f.degree();
        prop_assume!(d >= 1);
        let chart = Chart::u(k, 3);
        let c = compactified_field(&f, chart).unwrap();
        let xq: Vec<Q> = x.iter().map(|&(a, b)| q(a, b)).collect();
        let px = f.eval_q(&xq);
        let xk = xq[k - 1].clone();
        let others: Vec<usize> = (0..3).filter(|&i| i != k - 1).collect();
        let mut z: Vec<Q> = others.iter().map(|&i| &xq[i] / &xk).collect();
        let zq = qi(1) / &xk;
        z.push(zq.clone());
        let mut dphi: Vec<Q> = others
            .iter()
            .map(|&i| (&px[i] * &xk - &xq[i] * &px[k - 1]) / (&xk * &xk))
            .collect();
        dphi.push(-&px[k - 1] / (&xk * &xk));
        let factor = (0..d - 1).fold(qi(1), |acc, _| acc * &zq);
        let got = c.eval_q(&z);
        for (g, w) in got.iter().zip(&dphi) {
            prop_assert_eq!(g.clone(), &factor * w);
        }
    }

    #[test]
    fn v_chart_is_signed_u_chart(f in small_field(3, 3), k in 1usize..=4) {
        let d = f.degree();
        let u = compactified_field(&f, Chart::u(k, 3)).unwrap();
        let v = compactified_field(&f, Chart::v(k, 3)).unwrap();
        let sign = if d % 2 == 1 { qi(1) } else { qi(-1) };
        prop_assert_eq!(v, u.scale(&sign));
    }

    #[test]
    fn chart_coordinates_invert(x in metric(4), k in 1usize..=5) {
        let chart = Chart::u(k, 4);
        let p = chart_coords(&x, chart).unwrap();
        let back = ricci_core::compactify::chart_inverse(&p, chart).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!(rel(*a, *b) < 1e-14);
        }
    }

    #[test]
    fn json_round_trip(f in small_field(3, 4)) {
        prop_assume!(f.components.iter().all(|c| !c.is_zero()));
        let back = decode_field(&encode_field(&f)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn text_round_trip(p in small_poly(3, 4)) {
        let names = ["a", "b", "c"];
        let text = p.fmt_with(&names);
        let back = Parser::new(&names).parse(&text).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn space_text_round_trip(spec in any_space()) {
        let parsed = spec.to_string().parse::<SpaceSpec>();
        if spec.validate().is_ok() {
            prop_assert_eq!(parsed.unwrap(), spec);
        } else {
            prop_assert!(parsed.is_err());
        }
    }

    #[test]
    fn volume_is_flow_invariant((spec, x) in space_and_metric()) {
        let iso = catalog_lookup(&spec).unwrap();
        let v = flow_rhs(&iso, &Metric::new(x.clone()).unwrap(), iso.n_dim() as f64).unwrap();
        let dvol: f64 = iso.dims.iter().zip(&v).zip(&x).map(|((d, vi), xi)| *d as f64 * vi / xi).sum();
        let mag: f64 = iso.dims.iter().zip(&v).zip(&x).map(|((d, vi), xi)| (*d as f64 * vi / xi).abs()).sum();
        prop_assert!(dvol.abs() <= 1e-12 * mag.max(1.0));
    }
}
