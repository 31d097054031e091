use ricci_core::curvature::{ricci_general, Metric};
use ricci_core::rootfind::known::exceptional_wallach;
use ricci_core::rootfind::{
    annotate_matches, classify, find_fixed_points, jensen_metrics, match_known, reduced_residual, reduced_system,
    FixedPointRecord, SearchOptions,
};
use ricci_core::spaces::{catalog_lookup, FlagId, SpaceSpec};

fn search(spec: &SpaceSpec) -> Vec<FixedPointRecord> {
    find_fixed_points(spec, &SearchOptions::default()).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0))
}

fn same_set(found: &[FixedPointRecord], want: &[&[f64]], tol: f64) {
    assert_eq!(
        found.len(),
        want.len(),
        "{:?}",
        found.iter().map(|f| &f.z).collect::<Vec<_>>()
    );
    for w in want {
        assert!(found.iter().any(|f| close(&f.z, w, tol)), "missing {:?}", w);
    }
}

#[test]
fn gws7_roots() {
    let fps = search(&SpaceSpec::gws(7));
    same_set(&fps, &[&[1.0, 1.0], &[2.0, 1.0], &[1.0, 2.0], &[0.5, 0.5]], 1e-12);
}

#[test]
fn v2_five_has_one_root() {
    let fps = search(&SpaceSpec::v2(5));
    same_set(&fps, &[&[2.0 / 3.0, 2.0 / 3.0]], 1e-12);
}

#[test]
fn v5r7_four_roots() {
    // listed order (x12, x23, x13) / x2, swapped into (x12, x13, x23) / x2
    let fps = search(&SpaceSpec::stiefel(4, 2));
    same_set(
        &fps,
        &[
            &[4.1466, 1.03361, 4.07919],
            &[2.29783, 3.98856, 3.43436],
            &[1.0, 2.54858, 2.54858],
            &[1.0, 0.78475, 0.78475],
        ],
        1e-4,
    );
}

#[test]
fn e8a3_five_roots_with_kahler_point() {
    let fps = search(&SpaceSpec::flag(FlagId::E8a3));
    assert_eq!(fps.len(), 5);
    assert!(fps.iter().any(|f| close(&f.z, &[2.0, 3.0, 4.0], 1e-12)));
}

#[test]
fn gws8_and_gws14_match_detailed_lists() {
    for id in [8, 14] {
        let spec = SpaceSpec::gws(id);
        let r = match_known(&spec, &search(&spec));
        assert!(r.exact_within(1e-4), "{:?}", r);
    }
}

#[test]
fn exceptional_wallach_rows_other_than_8_and_14() {
    for id in [6, 7, 9, 11, 12, 13, 15] {
        let fps = search(&SpaceSpec::gws(id));
        let rows = exceptional_wallach(id).unwrap();
        assert_eq!(fps.len(), rows.len(), "gws{}", id);
        for row in rows {
            assert!(fps.iter().any(|f| close(&f.metric, &row, 1e-4)), "gws{} {:?}", id, row);
        }
    }
}

#[test]
fn gws3_one_two_three() {
    let spec = SpaceSpec::gws_klm(3, 1, 2, 3);
    let mut fps = search(&spec);
    let r = annotate_matches(&spec, &mut fps);
    assert_eq!(r.pairs.len(), 4);
    assert!(r.max_mismatch < 1e-4);
    assert!(fps
        .iter()
        .any(|f| f.matched_reference.as_deref() == Some(&[3.26361, 1.60389][..])));
}

#[test]
fn records_are_einstein() {
    for spec in [SpaceSpec::gws(6), SpaceSpec::stiefel(5, 3), SpaceSpec::flag(FlagId::E7)] {
        let iso = catalog_lookup(&spec).unwrap();
        for f in search(&spec) {
            assert!(f.residual < 1e-12);
            assert!(f.einstein_residual < 1e-8);
            assert!(f.metric.iter().all(|v| *v > 0.0));
            let r = ricci_general(&iso, &Metric::new(f.metric.clone()).unwrap()).unwrap();
            assert!(r.einstein_residual < 1e-8);
        }
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let spec = SpaceSpec::stiefel(6, 2);
    let many = search(&spec);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let one = pool.install(|| search(&spec));
    assert_eq!(many, one);
    let sorted = many
        .windows(2)
        .all(|w| w[0].z.partial_cmp(&w[1].z) == Some(std::cmp::Ordering::Less));
    assert!(sorted);
}

#[test]
fn near_pair_is_two_simple_roots() {
    let fps = search(&SpaceSpec::stiefel(6, 2));
    assert_eq!(fps.len(), 6);
    let a = fps
        .iter()
        .find(|f| close(&f.z, &[0.95544, 0.734193, 0.798009], 1e-4))
        .unwrap();
    let b = fps.iter().find(|f| close(&f.z, &[1.0, 0.8, 0.8], 1e-9)).unwrap();
    assert_eq!(a.multiplicity_hint, 1);
    assert_eq!(b.multiplicity_hint, 1);
}

#[test]
fn double_root_is_reported_once() {
    // k = 2 rho, m = rho^2 + 1 with rho = 2
    let fps = search(&SpaceSpec::gws_klm(1, 4, 5, 5));
    assert_eq!(fps.len(), 3);
    assert_eq!(fps.iter().filter(|f| f.multiplicity_hint == 2).count(), 1);
}

#[test]
fn gws7_spectrum_at_normal_metric_is_real() {
    let spec = SpaceSpec::gws(7);
    let c = classify(&spec, &[1.0, 1.0]).unwrap();
    assert_eq!(c.eigenvalues.len(), 2);
    assert!(c.eigenvalues.iter().all(|e| e.im == 0.0));
    assert!(c.jacobian_gap < 1e-4);
}

#[test]
fn classify_commutes_with_symmetry() {
    // GWS.7 is symmetric under x2 <-> x3, which swaps the roots (2,1) and (1,2)
    let spec = SpaceSpec::gws(7);
    let a = classify(&spec, &[2.0, 1.0]).unwrap();
    let b = classify(&spec, &[1.0, 2.0]).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x.re - y.re).abs() < 1e-12 && (x.im - y.im).abs() < 1e-12);
    }
    assert_eq!(a.hyperbolic, b.hyperbolic);
}

#[test]
fn gws7_spectrum_against_finite_difference_oracle() {
    let spec = SpaceSpec::gws(7);
    let sys = reduced_system(&spec).unwrap();
    let z = [0.5, 0.5];
    let h = 1e-5;
    let mut j = [[0.0; 2]; 2];
    for k in 0..2 {
        let mut p = z;
        let mut m = z;
        p[k] += h;
        m[k] -= h;
        let (fp, fm) = (sys.eval_f64(&p), sys.eval_f64(&m));
        for i in 0..2 {
            j[i][k] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    assert!(disc >= 0.0);
    let mut want = [(tr - disc.sqrt()) / 2.0, (tr + disc.sqrt()) / 2.0];
    want.sort_by(f64::total_cmp);
    let c = classify(&spec, &z).unwrap();
    for (e, w) in c.eigenvalues.iter().zip(want) {
        assert!(
            (e.re - w).abs() < 1e-6 * w.abs().max(1.0),
            "{:?} {:?}",
            c.eigenvalues,
            want
        );
    }
}

#[test]
fn v2_five_has_no_zero_eigenvalue() {
    let c = classify(&SpaceSpec::v2(5), &[2.0 / 3.0, 2.0 / 3.0]).unwrap();
    assert!(c.eigenvalues.iter().all(|e| e.re.hypot(e.im) > 1e-6));
}

#[test]
fn jensen_values_and_limit() {
    let [p, m] = jensen_metrics(6).unwrap();
    assert!((p.z[1] - 3.76205).abs() < 1e-5);
    assert!((m.z[1] - 0.63795).abs() < 1e-5);
    let [p, m] = jensen_metrics(100_000).unwrap();
    assert!((p.z[1] - (2.0 + 2f64.sqrt())).abs() < 1e-4);
    assert!((m.z[1] - (2.0 - 2f64.sqrt())).abs() < 1e-4);
    for k2 in [2, 3, 7] {
        for pt in jensen_metrics(k2).unwrap() {
            assert!(reduced_residual(&SpaceSpec::stiefel(k2, k2), &pt.z[..3]).unwrap() < 1e-10);
        }
    }
}

#[test]
fn record_json_shape() {
    let spec = SpaceSpec::v2(12);
    let mut fps = search(&spec);
    annotate_matches(&spec, &mut fps);
    let v = serde_json::to_value(&fps[0]).unwrap();
    assert_eq!(v["space"], "v2:n=12");
    assert_eq!(v["chart"], "U1");
    assert_eq!(v["metric"][0], 1.0);
    assert!((v["z"][0].as_f64().unwrap() - 11.0 / 20.0).abs() < 1e-12);
    assert!(v["eigenvalues"][0]["re"].is_number());
    assert!(v["matched_reference"].is_array());
    let none = serde_json::to_value(&search(&SpaceSpec::gws_klm(1, 3, 2, 2))[0]).unwrap();
    assert!(none["matched_reference"].is_null());
}
