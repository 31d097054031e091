//! Positive zeros of the flow's slice at infinity in the chart `U_1`.
//!
//! A zero `z` of the reduced system corresponds to the ray through the
//! invariant metric `(1, z_1, .., z_(q-1))`, and such rays are exactly the
//! Einstein metrics of the space.

pub mod certificates;
pub mod known;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::compactify::{compactified_field, infinity_system, Chart, ChartPoint};
use crate::curvature::{ricci_specialized, Metric};
use crate::error::{Error, Result};
use crate::flowfield::oriented_system;
use crate::poly::{CompiledPoly, PolyVectorField};
use crate::spaces::SpaceSpec;

pub use certificates::{certificate_check, CertificateName, SignCertificate, SignReport};
pub use known::known_fixed_points;

/// Search parameters for [`find_fixed_points`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    /// Seeds and accepted roots lie in `[lower, upper]` in every coordinate.
    pub lower: f64,
    pub upper: f64,
    /// Seeds per coordinate axis, spaced geometrically.
    pub grid_density: usize,
    /// Bound on the componentwise backward error of accepted roots.
    pub tol: f64,
    /// Also start from the published roots, when there are any.
    pub extra_seeds: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            lower: 1e-3,
            upper: 10.0,
            grid_density: 12,
            tol: 1e-12,
            extra_seeds: true,
        }
    }
}

impl SearchOptions {
    fn validate(&self) -> Result<()> {
        let ok_box = self.lower > 0.0 && self.upper > self.lower && self.upper.is_finite();
        if !ok_box {
            return Err(Error::ParameterOutOfRange(format!(
                "search box ({}, {}] is not inside the positive orthant",
                self.lower, self.upper
            )));
        }
        if self.grid_density < 8 {
            return Err(Error::ParameterOutOfRange(format!(
                "grid density {} is below 8",
                self.grid_density
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidTolerance(format!("tol = {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointRecord {
    #[serde(serialize_with = "serialize_display")]
    pub space: SpaceSpec,
    pub chart: Chart,
    pub z: Vec<f64>,
    /// Largest componentwise backward error `|F_i(z)| / sum |terms of F_i|`.
    pub residual: f64,
    pub metric: Vec<f64>,
    pub einstein_residual: f64,
    pub einstein_constant: f64,
    pub eigenvalues: Vec<Eigenvalue>,
    pub hyperbolic: bool,
    pub multiplicity_hint: u32,
    pub matched_reference: Option<Vec<f64>>,
}

pub(crate) fn serialize_display<T: std::fmt::Display, S: Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// The flow's slice at infinity in `U_1`: `q - 1` polynomials in `q - 1`
/// unknowns whose positive zeros are the Einstein rays.
pub fn reduced_system(spec: &SpaceSpec) -> Result<PolyVectorField> {
    let field = oriented_system(spec)?;
    let c = compactified_field(&field, Chart::u(1, field.len()))?;
    Ok(infinity_system(&c))
}

/// Each component divided by its largest monomial factor. Same positive
/// zeros, better behaved near the coordinate hyperplanes.
fn stripped(sys: &PolyVectorField) -> PolyVectorField {
    PolyVectorField::new(
        sys.components
            .iter()
            .map(|p| p.div_monomial(&p.monomial_content()).expect("content divides"))
            .collect(),
    )
}

struct System {
    comps: Vec<CompiledPoly>,
    n: usize,
}

impl System {
    fn new(sys: &PolyVectorField) -> Self {
        System {
            comps: sys.compile(),
            n: sys.nvars(),
        }
    }

    fn backward_error(&self, z: &[f64]) -> f64 {
        self.comps
            .iter()
            .map(|c| {
                let (v, s) = c.eval_with_scale(z);
                if s == 0.0 {
                    0.0
                } else {
                    v.abs() / s
                }
            })
            .fold(0.0, f64::max)
    }

    /// Values and Jacobian, both with each row divided by its term scale.
    fn scaled(&self, z: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.n;
        let mut f = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, n);
        let mut g = vec![0.0; n];
        for (i, c) in self.comps.iter().enumerate() {
            let (v, s) = c.eval_with_scale(z);
            let s = if s > 0.0 { s } else { 1.0 };
            f[i] = v / s;
            c.gradient(z, &mut g);
            for k in 0..n {
                j[(i, k)] = g[k] / s;
            }
        }
        (f, j)
    }

    fn jacobian(&self, z: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut j = DMatrix::zeros(n, n);
        let mut g = vec![0.0; n];
        for (i, c) in self.comps.iter().enumerate() {
            c.gradient(z, &mut g);
            for k in 0..n {
                j[(i, k)] = g[k];
            }
        }
        j
    }

    fn eval(&self, z: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval(z)).collect()
    }
}

const MAX_ITER: usize = 100;
const MAX_LOG_STEP: f64 = 2.0;

/// Damped Newton in `u = log z` from one seed.
fn newton(sys: &System, seed: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = sys.n;
    let mut u: Vec<f64> = seed.iter().map(|v| v.ln()).collect();
    let zof = |u: &[f64]| u.iter().map(|v| v.exp()).collect::<Vec<f64>>();
    let mut z = zof(&u);
    let mut merit = sys.backward_error(&z);
    for _ in 0..MAX_ITER {
        if merit <= tol * 0.01 {
            break;
        }
        let (f, mut j) = sys.scaled(&z);
        for k in 0..n {
            for i in 0..n {
                j[(i, k)] *= z[k];
            }
        }
        let mut step = j.lu().solve(&(-f))?;
        let big = step.amax();
        if !big.is_finite() {
            return None;
        }
        if big > MAX_LOG_STEP {
            step *= MAX_LOG_STEP / big;
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = (0..n).map(|i| u[i] + alpha * step[i]).collect();
            let zt = zof(&trial);
            let mt = sys.backward_error(&zt);
            if mt < merit {
                u = trial;
                z = zt;
                merit = mt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted || u.iter().any(|v| !(-25.0..12.0).contains(v)) {
            break;
        }
    }
    polish(sys, &mut z, &mut merit);
    (merit <= tol).then_some(z)
}

fn polish(sys: &System, z: &mut Vec<f64>, merit: &mut f64) {
    for _ in 0..3 {
        let (f, j) = sys.scaled(z);
        let Some(step) = j.lu().solve(&(-f)) else { return };
        let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        if trial.iter().any(|v| !(*v > 0.0)) {
            return;
        }
        let mt = sys.backward_error(&trial);
        if mt < *merit {
            *z = trial;
            *merit = mt;
        } else {
            return;
        }
    }
}

fn seeds(dim: usize, opts: &SearchOptions, extra: Option<Vec<Vec<f64>>>) -> Vec<Vec<f64>> {
    let (a, b) = (opts.lower.ln(), opts.upper.ln());
    let d = opts.grid_density;
    let axis: Vec<f64> = (0..d)
        .map(|i| (a + (b - a) * (i as f64 + 0.5) / d as f64).exp())
        .collect();
    let mut out = Vec::with_capacity(d.pow(dim as u32));
    let mut idx = vec![0usize; dim];
    loop {
        out.push(idx.iter().map(|&i| axis[i]).collect());
        let mut k = 0;
        while k < dim {
            idx[k] += 1;
            if idx[k] < d {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == dim {
            break;
        }
    }
    if let Some(extra) = extra {
        out.extend(
            extra
                .into_iter()
                .filter(|p| p.len() == dim && p.iter().all(|v| *v > 0.0)),
        );
    }
    out
}

fn rel_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()))
        .fold(0.0, f64::max)
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Smallest singular value of the row-scaled Jacobian in log coordinates,
/// which is of order one at a simple root.
fn conditioning(sys: &System, z: &[f64]) -> f64 {
    let (_, mut j) = sys.scaled(z);
    for k in 0..sys.n {
        for i in 0..sys.n {
            j[(i, k)] *= z[k];
        }
    }
    j.singular_values().min()
}

const DEDUP: f64 = 1e-8;
const SINGULAR: f64 = 1e-5;
const MERGE: f64 = 1e-4;
const BOUNDARY: f64 = 1e-6;
const EINSTEIN_TOL: f64 = 1e-8;

struct Root {
    z: Vec<f64>,
    residual: f64,
    cond: f64,
    hint: u32,
}

/// All positive zeros of [`reduced_system`] found by multi-start Newton,
/// in lexicographic order of `z`.
pub fn find_fixed_points(spec: &SpaceSpec, opts: &SearchOptions) -> Result<Vec<FixedPointRecord>> {
    spec.validate()?;
    opts.validate()?;
    let reduced = reduced_system(spec)?;
    let sys = System::new(&stripped(&reduced));
    let dim = sys.n;
    let extra = if opts.extra_seeds {
        known_fixed_points(spec)
    } else {
        None
    };
    let starts = seeds(dim, opts, extra);

    let mut found: Vec<Vec<f64>> = starts
        .par_iter()
        .filter_map(|s| newton(&sys, s, opts.tol))
        .filter(|z| {
            z.iter()
                .all(|v| *v > BOUNDARY && *v >= opts.lower * (1.0 - 1e-9) && *v <= opts.upper * (1.0 + 1e-9))
        })
        .collect();
    found.sort_by(|a, b| lex(a, b));

    let mut roots: Vec<Root> = Vec::new();
    for z in found {
        let residual = sys.backward_error(&z);
        if let Some(r) = roots.iter_mut().find(|r| rel_dist(&r.z, &z) <= DEDUP) {
            if residual < r.residual {
                r.z = z;
                r.residual = residual;
            }
            continue;
        }
        let cond = conditioning(&sys, &z);
        let near_singular = cond < SINGULAR;
        if let Some(r) = roots
            .iter_mut()
            .find(|r| (near_singular || r.cond < SINGULAR) && rel_dist(&r.z, &z) <= MERGE)
        {
            r.hint = r.hint.max(2);
            if residual < r.residual {
                r.z = z;
                r.residual = residual;
                r.cond = cond;
            }
            continue;
        }
        roots.push(Root {
            z,
            residual,
            cond,
            hint: if near_singular { 2 } else { 1 },
        });
    }

    let dyn_sys = System::new(&reduced);
    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let mut metric = vec![1.0];
        metric.extend_from_slice(&r.z);
        let ric = ricci_specialized(spec, &Metric::new(metric.clone())?)?;
        if !(ric.einstein_residual < EINSTEIN_TOL) {
            continue;
        }
        let eigenvalues = spectrum(&dyn_sys.jacobian(&r.z));
        out.push(FixedPointRecord {
            space: *spec,
            chart: Chart::u(1, dim + 1),
            hyperbolic: is_hyperbolic(&eigenvalues),
            z: r.z,
            residual: r.residual,
            metric,
            einstein_residual: ric.einstein_residual,
            einstein_constant: ric.einstein_constant,
            eigenvalues,
            multiplicity_hint: r.hint,
            matched_reference: None,
        });
    }
    out.sort_by(|a, b| lex(&a.z, &b.z));
    Ok(out)
}

fn spectrum(j: &DMatrix<f64>) -> Vec<Eigenvalue> {
    let mut ev: Vec<Eigenvalue> = j
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|c| Eigenvalue { re: c.re, im: c.im })
        .collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

const HYPERBOLIC: f64 = 1e-6;

fn is_hyperbolic(ev: &[Eigenvalue]) -> bool {
    ev.iter().all(|e| e.re.abs() >= HYPERBOLIC)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub eigenvalues: Vec<Eigenvalue>,
    pub hyperbolic: bool,
    /// `max |J_exact - J_central| / max |J_exact|`.
    pub jacobian_gap: f64,
}

const FD_STEP: f64 = 1e-6;
const FD_GAP: f64 = 1e-3;

/// Linearization of the reduced system at `z`. The exact Jacobian is
/// cross-checked against central differences with relative step `1e-6`.
pub fn classify(spec: &SpaceSpec, z: &[f64]) -> Result<Classification> {
    let reduced = reduced_system(spec)?;
    let sys = System::new(&reduced);
    if z.len() != sys.n {
        return Err(Error::DimensionMismatch {
            expected: sys.n,
            got: z.len(),
        });
    }
    let exact = sys.jacobian(z);
    let mut central = DMatrix::zeros(sys.n, sys.n);
    for k in 0..sys.n {
        let h = FD_STEP * z[k].abs().max(1.0e-3);
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[k] += h;
        zm[k] -= h;
        let (fp, fm) = (sys.eval(&zp), sys.eval(&zm));
        for i in 0..sys.n {
            central[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let scale = exact.amax().max(f64::MIN_POSITIVE);
    let gap = (&exact - &central).amax() / scale;
    if !(gap <= FD_GAP) {
        return Err(Error::IllConditioned(gap));
    }
    let eigenvalues = spectrum(&exact);
    Ok(Classification {
        hyperbolic: is_hyperbolic(&eigenvalues),
        eigenvalues,
        jacobian_gap: gap,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchPair {
    pub found: Vec<f64>,
    pub listed: Vec<f64>,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    #[serde(serialize_with = "serialize_display")]
    pub space: SpaceSpec,
    pub pairs: Vec<MatchPair>,
    pub max_mismatch: f64,
    pub unmatched_listed: Vec<Vec<f64>>,
    pub extra: Vec<Vec<f64>>,
}

impl MatchReport {
    /// Every listed value paired, no extra roots, and every pair within `tol`.
    pub fn exact_within(&self, tol: f64) -> bool {
        self.unmatched_listed.is_empty() && self.extra.is_empty() && self.max_mismatch <= tol
    }
}

/// Pairing radius, relative L-infinity.
pub const MATCH_RADIUS: f64 = 1e-2;

/// Pair found roots with the given reference values, closest pairs first.
pub fn match_against(spec: &SpaceSpec, found: &[Vec<f64>], listed: &[Vec<f64>]) -> MatchReport {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (i, f) in found.iter().enumerate() {
        for (j, p) in listed.iter().enumerate() {
            if f.len() == p.len() {
                let d = rel_dist(f, p);
                if d <= MATCH_RADIUS {
                    cand.push((d, i, j));
                }
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_f = vec![false; found.len()];
    let mut used_p = vec![false; listed.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in cand {
        if !used_f[i] && !used_p[j] {
            used_f[i] = true;
            used_p[j] = true;
            pairs.push(MatchPair {
                found: found[i].clone(),
                listed: listed[j].clone(),
                rel_error: d,
            });
        }
    }
    pairs.sort_by(|a, b| lex(&a.found, &b.found));
    MatchReport {
        space: *spec,
        max_mismatch: pairs.iter().map(|p| p.rel_error).fold(0.0, f64::max),
        pairs,
        unmatched_listed: (0..listed.len())
            .filter(|&j| !used_p[j])
            .map(|j| listed[j].clone())
            .collect(),
        extra: (0..found.len())
            .filter(|&i| !used_f[i])
            .map(|i| found[i].clone())
            .collect(),
    }
}

/// Pair found roots with the published list for `spec`.
pub fn match_known(spec: &SpaceSpec, fps: &[FixedPointRecord]) -> MatchReport {
    let found: Vec<Vec<f64>> = fps.iter().map(|f| f.z.clone()).collect();
    let listed = known_fixed_points(spec).unwrap_or_default();
    match_against(spec, &found, &listed)
}

/// Fill `matched_reference` from [`match_known`].
pub fn annotate_matches(spec: &SpaceSpec, fps: &mut [FixedPointRecord]) -> MatchReport {
    let report = match_known(spec, fps);
    for fp in fps.iter_mut() {
        fp.matched_reference = report.pairs.iter().find(|p| p.found == fp.z).map(|p| p.listed.clone());
    }
    report
}

/// The two normal homogeneous-type Einstein metrics on the Stiefel block
/// space with `k3 = k2`, as points `(1, t, t, 0)` at infinity of `U_1`.
pub fn jensen_metrics(k2: u32) -> Result<[ChartPoint; 2]> {
    if k2 < 2 {
        return Err(Error::ParameterOutOfRange(format!("k2 = {} must be at least 2", k2)));
    }
    let k = k2 as f64;
    let root = (2.0 * k * k - 2.0 * k + 1.0).sqrt();
    let t = |s: f64| (2.0 * k - 1.0 + s * root) / (k - 1.0);
    let point = |t: f64| ChartPoint {
        z: vec![1.0, t, t, 0.0],
    };
    Ok([point(t(1.0)), point(t(-1.0))])
}

/// Largest componentwise backward error of [`reduced_system`] at `z`.
pub fn reduced_residual(spec: &SpaceSpec, z: &[f64]) -> Result<f64> {
    let sys = System::new(&reduced_system(spec)?);
    if z.len() != sys.n {
        return Err(Error::DimensionMismatch {
            expected: sys.n,
            got: z.len(),
        });
    }
    Ok(sys.backward_error(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zs(spec: &SpaceSpec) -> Vec<Vec<f64>> {
        find_fixed_points(spec, &SearchOptions::default())
            .unwrap()
            .into_iter()
            .map(|f| f.z)
            .collect()
    }

    #[test]
    fn gws7_four_roots() {
        let got = zs(&SpaceSpec::gws(7));
        let want = [[0.5, 0.5], [1.0, 1.0], [1.0, 2.0], [2.0, 1.0]];
        assert_eq!(got.len(), 4, "{:?}", got);
        for (g, w) in got.iter().zip(want) {
            assert!(rel_dist(g, &w) < 1e-12, "{:?} vs {:?}", g, w);
        }
    }

    #[test]
    fn v2_single_root() {
        let got = zs(&SpaceSpec::v2(5));
        assert_eq!(got.len(), 1);
        assert!(rel_dist(&got[0], &[2.0 / 3.0, 2.0 / 3.0]) < 1e-12);
    }

    #[test]
    fn seeds_cover_box() {
        let o = SearchOptions::default();
        let s = seeds(2, &o, None);
        assert_eq!(s.len(), 144);
        assert!(s.iter().flatten().all(|v| *v > o.lower && *v < o.upper));
    }

    #[test]
    fn jensen_closed_form() {
        let [p, m] = jensen_metrics(6).unwrap();
        assert!((p.z[1] - (11.0 + 61f64.sqrt()) / 5.0).abs() < 1e-14);
        assert!((m.z[1] - (11.0 - 61f64.sqrt()) / 5.0).abs() < 1e-14);
        assert!(p.at_infinity());
        assert!(jensen_metrics(1).is_err());
    }

    #[test]
    fn options_are_checked() {
        let spec = SpaceSpec::gws(7);
        let bad = SearchOptions {
            grid_density: 4,
            ..Default::default()
        };
        assert!(find_fixed_points(&spec, &bad).is_err());
        let bad = SearchOptions {
            lower: 0.0,
            ..Default::default()
        };
        assert!(find_fixed_points(&spec, &bad).is_err());
    }

    #[test]
    fn greedy_matching() {
        let spec = SpaceSpec::gws(7);
        let found = vec![vec![1.0, 1.0], vec![1.001, 1.0], vec![3.0, 3.0]];
        let listed = vec![vec![1.0002, 1.0], vec![0.5, 0.5]];
        let r = match_against(&spec, &found, &listed);
        assert_eq!(r.pairs.len(), 1);
        assert_eq!(r.pairs[0].found, vec![1.0, 1.0]);
        assert_eq!(r.unmatched_listed, vec![vec![0.5, 0.5]]);
        assert_eq!(r.extra.len(), 2);
    }
}
