use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ricci_core::curvature::Metric;
use ricci_core::flowfield::polynomial_system;
use ricci_core::integrate::{
    basin_scan, integrate_flow, invariant_ray_check, slice_grid, BasinLabel, Outcome, DEGENERATE,
};
use ricci_core::spaces::{FlagId, SpaceSpec};
use ricci_core::Error;

fn run(spec: &SpaceSpec, x0: &[f64], t: f64, rtol: f64) -> ricci_core::integrate::Trajectory {
    integrate_flow(spec, &Metric::new(x0.to_vec()).unwrap(), t, rtol, rtol).unwrap()
}

#[test]
fn einstein_start_is_stationary() {
    let tr = run(&SpaceSpec::gws(7), &[1.0, 1.0, 1.0], 10.0, 1e-9);
    assert_eq!(tr.outcome, Outcome::Converged);
    for s in &tr.states {
        for v in s.coords() {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn gws7_forward_run_degenerates_with_increasing_scalar() {
    let tr = run(&SpaceSpec::gws(7), &[1.0, 0.9, 1.1], 100.0, 1e-9);
    assert_eq!(tr.outcome, Outcome::Degenerate);
    assert!(tr.scalar.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    assert!(tr.volume_drift() < 1e-8);
    assert!(tr.final_state().coords().iter().any(|v| *v < DEGENERATE));
}

#[test]
fn gws7_reverse_run_reaches_einstein_metric() {
    let tr = run(&SpaceSpec::gws(7), &[1.0, 0.9, 1.1], -400.0, 1e-9);
    assert_eq!(tr.outcome, Outcome::Converged);
    assert!(*tr.einstein_residual.last().unwrap() < 1e-6);
    assert!(tr.volume_drift() < 1e-8);
    assert!(tr.times.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn v2_ray_is_invariant_under_the_flow() {
    let n = 5.0;
    let c = 2.0 * (n - 2.0) / (n - 1.0);
    let t = 1.7;
    let tr = run(&SpaceSpec::v2(5), &[c * t, t, t], 20.0, 1e-10);
    for s in &tr.states {
        let x = s.coords();
        assert!((x[0] / x[1] - c).abs() / c < 1e-9);
        assert!((x[1] - x[2]).abs() / x[1] < 1e-9);
    }
}

#[test]
fn invariant_rays() {
    let ts: Vec<f64> = (1..=10).map(|i| 0.37 * i as f64).collect();
    assert!(invariant_ray_check(&SpaceSpec::v2(6), &ts).unwrap() < 1e-12);
    assert!(invariant_ray_check(&SpaceSpec::flag(FlagId::F4), &ts).unwrap() < 1e-12);
    assert!(invariant_ray_check(&SpaceSpec::gws(7), &ts).is_err());
}

#[test]
fn each_component_vanishes_on_its_coordinate_plane() {
    for spec in [
        SpaceSpec::v2(6),
        SpaceSpec::stiefel(4, 3),
        SpaceSpec::flag(FlagId::E7),
        SpaceSpec::gws(11),
    ] {
        let f = polynomial_system(&spec).unwrap();
        for (i, p) in f.components.iter().enumerate() {
            assert!(p.monomial_content().0[i] >= 1, "{} component {}", spec, i);
        }
    }
}

#[test]
fn volume_is_conserved_on_random_starts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in SpaceSpec::catalog() {
        for _ in 0..3 {
            let x0: Vec<f64> = (0..spec.q()).map(|_| rng.gen_range(-1.0f64..1.0).exp()).collect();
            let tr = run(&spec, &x0, 50.0, 1e-8);
            assert!(tr.volume_drift() <= 10.0 * 1e-8 * 50.0, "{}", spec);
            assert!(tr.states.iter().all(|s| s.coords().iter().all(|v| *v > 0.0)));
        }
    }
}

#[test]
fn endpoint_error_shrinks_with_rtol() {
    let spec = SpaceSpec::flag(FlagId::E7);
    let x0 = [1.0, 1.3, 2.0, 2.2];
    let reference = run(&spec, &x0, 2.0, 1e-12);
    let err = |rtol: f64| {
        let tr = run(&spec, &x0, 2.0, rtol);
        tr.final_state()
            .coords()
            .iter()
            .zip(reference.final_state().coords())
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(1e-6), err(5e-7));
    assert!(fine * 2.0 <= coarse * 1.5, "{} {}", coarse, fine);
    assert!(err(1e-9) < coarse);
}

#[test]
fn rejects_bad_tolerances_and_dimensions() {
    let spec = SpaceSpec::gws(7);
    let x0 = Metric::new(vec![1.0, 1.0, 1.0]).unwrap();
    assert!(matches!(
        integrate_flow(&spec, &x0, 1.0, 1e-2, 1e-9),
        Err(Error::InvalidTolerance(_))
    ));
    let bad = Metric::new(vec![1.0, 1.0]).unwrap();
    assert!(matches!(
        integrate_flow(&spec, &bad, 1.0, 1e-9, 1e-9),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(Metric::new(vec![1.0, -1.0, 1.0]).is_err());
}

#[test]
fn csv_layout() {
    let tr = run(&SpaceSpec::gws(7), &[1.0, 0.9, 1.1], 1.0, 1e-6);
    let csv = tr.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,x_1,x_2,x_3,volume_log,scalar,einstein_residual"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), tr.times.len());
    assert!(rows.iter().all(|r| r.split(',').count() == 7));
}

#[test]
fn basin_scan_gws7() {
    let spec = SpaceSpec::gws(7);
    let grid = slice_grid(3, 0.5, 2.0, 4);
    let scan = basin_scan(&spec, &grid, 50.0).unwrap();
    assert_eq!(scan.len(), 16);
    for e in &scan {
        if e.label != BasinLabel::Degenerate {
            assert!(e.einstein_residual < 1e-6, "{:?}", e);
        }
    }
    // swapping z1 and z2 is a symmetry of GWS.7
    let swapped: Vec<Vec<f64>> = grid.iter().map(|z| vec![z[1], z[0]]).collect();
    let other = basin_scan(&spec, &swapped, 50.0).unwrap();
    for (a, b) in scan.iter().zip(&other) {
        match (&a.label, &b.label) {
            (BasinLabel::Fixed { z: za, .. }, BasinLabel::Fixed { z: zb, .. }) => {
                assert!((za[0] - zb[1]).abs() < 1e-9 && (za[1] - zb[0]).abs() < 1e-9);
            }
            (x, y) => assert_eq!(x, y),
        }
    }
}

#[test]
fn basin_of_einstein_start() {
    let scan = basin_scan(&SpaceSpec::gws(7), &[vec![2.0, 1.0]], 5.0).unwrap();
    match &scan[0].label {
        BasinLabel::Fixed { z, .. } => assert!((z[0] - 2.0).abs() < 1e-12 && (z[1] - 1.0).abs() < 1e-12),
        other => panic!("{:?}", other),
    }
}
