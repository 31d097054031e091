//! Ricci components and scalar curvature of diagonal invariant metrics.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{q_to_f64, qi, Q};
use crate::spaces::{catalog_lookup, FlagId, IsotropyData, SpaceSpec};

/// Positive coordinates `(x_1, .., x_q)` of a diagonal invariant metric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    coords: Vec<f64>,
}

impl Metric {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::NonPositiveMetric(i));
        }
        Ok(Metric { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Metric> {
        Metric::new(self.coords.iter().map(|x| x * c).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.coords
    }
}

impl TryFrom<&[f64]> for Metric {
    type Error = Error;

    fn try_from(v: &[f64]) -> Result<Self> {
        Metric::new(v.to_vec())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciData {
    pub components: Vec<f64>,
    pub scalar: f64,
    pub einstein_residual: f64,
    pub einstein_constant: f64,
}

impl RicciData {
    /// Assemble from components; the scalar curvature is the trace `sum d_i r_i`.
    pub fn from_components(components: Vec<f64>, dims: &[f64]) -> Self {
        let scalar = components.iter().zip(dims).map(|(r, d)| r * d).sum();
        let mean = components.iter().sum::<f64>() / components.len() as f64;
        let einstein_residual = components.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
        RicciData {
            components,
            scalar,
            einstein_residual,
            einstein_constant: mean,
        }
    }

    /// Residual divided by the magnitude of the Einstein constant.
    pub fn relative_residual(&self) -> f64 {
        self.einstein_residual / self.einstein_constant.abs().max(f64::MIN_POSITIVE)
    }
}

fn check(g: &Metric, q: usize) -> Result<&[f64]> {
    if g.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            got: g.len(),
        });
    }
    Ok(g.coords())
}

fn dims_f64(iso: &IsotropyData) -> Vec<f64> {
    iso.dims.iter().map(|&d| d as f64).collect()
}

fn triples_f64(iso: &IsotropyData) -> Vec<Vec<Vec<f64>>> {
    let q = iso.q;
    let mut a = vec![vec![vec![0.0; q]; q]; q];
    for (i, ai) in a.iter_mut().enumerate() {
        for (j, aij) in ai.iter_mut().enumerate() {
            for (k, v) in aij.iter_mut().enumerate() {
                *v = q_to_f64(&iso.a(i, j, k));
            }
        }
    }
    a
}

/// Float copies of the dimensions and structure constants, for repeated
/// evaluation of the general formula.
#[derive(Clone, Debug)]
pub struct GeneralRicci {
    q: usize,
    d: Vec<f64>,
    a: Vec<Vec<Vec<f64>>>,
}

impl GeneralRicci {
    pub fn new(iso: &IsotropyData) -> Self {
        GeneralRicci {
            q: iso.q,
            d: dims_f64(iso),
            a: triples_f64(iso),
        }
    }

    pub fn dims(&self) -> &[f64] {
        &self.d
    }

    pub fn eval(&self, g: &Metric) -> Result<RicciData> {
        let x = check(g, self.q)?;
        let (q, d, a) = (self.q, &self.d, &self.a);
        let mut r = vec![0.0; q];
        for k in 0..q {
            let mut plus = 0.0;
            let mut minus = 0.0;
            for j in 0..q {
                for i in 0..q {
                    let ajik = a[j][i][k];
                    if ajik != 0.0 {
                        plus += x[k] / (x[j] * x[i]) * ajik;
                        minus += x[j] / (x[k] * x[i]) * ajik;
                    }
                }
            }
            r[k] = 0.5 / x[k] + plus / (4.0 * d[k]) - minus / (2.0 * d[k]);
        }
        Ok(RicciData::from_components(r, d))
    }
}

/// Ricci components from the general structure-constant formula.
pub fn ricci_general(iso: &IsotropyData, g: &Metric) -> Result<RicciData> {
    GeneralRicci::new(iso).eval(g)
}

/// Scalar curvature from the closed structure-constant formula, independent
/// of the Ricci components.
pub fn scalar_general(iso: &IsotropyData, g: &Metric) -> Result<f64> {
    let x = check(g, iso.q)?;
    let q = iso.q;
    let a = triples_f64(iso);
    let mut s: f64 = iso.dims.iter().zip(x).map(|(&d, xi)| d as f64 / xi).sum::<f64>() * 0.5;
    for i in 0..q {
        for j in 0..q {
            for k in 0..q {
                if a[i][j][k] != 0.0 {
                    s -= 0.25 * x[k] / (x[i] * x[j]) * a[i][j][k];
                }
            }
        }
    }
    Ok(s)
}

/// Exact Ricci components and scalar curvature at a rational metric.
pub fn ricci_exact(iso: &IsotropyData, x: &[Q]) -> Result<(Vec<Q>, Q)> {
    if x.len() != iso.q {
        return Err(Error::DimensionMismatch {
            expected: iso.q,
            got: x.len(),
        });
    }
    if let Some(i) = x.iter().position(|v| *v <= Q::zero()) {
        return Err(Error::NonPositiveMetric(i));
    }
    let q = iso.q;
    let d = iso.dims_q();
    let half = Q::new(1.into(), 2.into());
    let mut r = Vec::with_capacity(q);
    for k in 0..q {
        let mut plus = Q::zero();
        let mut minus = Q::zero();
        for j in 0..q {
            for i in 0..q {
                let ajik = iso.a(j, i, k);
                if !ajik.is_zero() {
                    plus += &x[k] / (&x[j] * &x[i]) * &ajik;
                    minus += &x[j] / (&x[k] * &x[i]) * &ajik;
                }
            }
        }
        r.push(&half / &x[k] + plus / (qi(4) * &d[k]) - minus / (qi(2) * &d[k]));
    }
    let s = r.iter().zip(&d).map(|(ri, di)| ri * di).fold(Q::zero(), |a, b| a + b);
    Ok((r, s))
}

/// Wallach-space components `r_i = 1/(2x_i) + a_i/2 (x_i/(x_j x_k) - x_k/(x_i x_j) - x_j/(x_i x_k))`.
pub fn ricci_wallach(a: [f64; 3], dims: [f64; 3], g: &Metric) -> Result<RicciData> {
    let x = check(g, 3)?;
    let r = (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            0.5 / x[i] + 0.5 * a[i] * (x[i] / (x[j] * x[k]) - x[k] / (x[i] * x[j]) - x[j] / (x[i] * x[k]))
        })
        .collect();
    Ok(RicciData::from_components(r, &dims))
}

pub fn scalar_wallach(a123: f64, dims: [f64; 3], g: &Metric) -> Result<f64> {
    let x = check(g, 3)?;
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    Ok(0.5 * (dims[0] / x1 + dims[1] / x2 + dims[2] / x3)
        - 0.5 * a123 * (x1 / (x2 * x3) + x2 / (x1 * x3) + x3 / (x1 * x2)))
}

/// `V_2 R^n` with coordinates `(x_0, x_1, x_2)`.
pub fn ricci_v2(n: u32, g: &Metric) -> Result<RicciData> {
    let x = check(g, 3)?;
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let m = n as f64 - 2.0;
    let r0 = 0.5 / x0 - 0.25 * (x1 / (x0 * x2) + x2 / (x0 * x1) - x0 / (x1 * x2));
    let r1 = 0.5 / x1 - (x0 / (x1 * x2) + x2 / (x0 * x1) - x1 / (x0 * x2)) / (4.0 * m);
    let r2 = 0.5 / x2 - (x0 / (x1 * x2) + x1 / (x0 * x2) - x2 / (x0 * x1)) / (4.0 * m);
    Ok(RicciData::from_components(vec![r0, r1, r2], &[1.0, m, m]))
}

pub fn scalar_v2(n: u32, g: &Metric) -> Result<f64> {
    let x = check(g, 3)?;
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let m = n as f64 - 2.0;
    Ok(0.5 / x0 - 0.25 * (x1 / (x0 * x2) + x2 / (x0 * x1) + x0 / (x1 * x2)) + 0.5 * m * (1.0 / x2 + 1.0 / x1))
}

/// Stiefel block metric with coordinates `(x_2, x_12, x_13, x_23)`.
pub fn ricci_stiefel_block(k2: u32, k3: u32, g: &Metric) -> Result<RicciData> {
    let x = check(g, 4)?;
    let (x2, x12, x13, x23) = (x[0], x[1], x[2], x[3]);
    let (k2f, k3f) = (k2 as f64, k3 as f64);
    let c = 1.0 / (4.0 * (k2f + k3f - 1.0));
    let r2 = (k2f - 2.0) * c / x2 + c * (x2 / (x12 * x12) + k3f * x2 / (x23 * x23));
    let r12 = 0.5 / x12 + k3f * c * (x12 / (x13 * x23) - x13 / (x12 * x23) - x23 / (x12 * x13))
        - c * (k2f - 1.0) * x2 / (x12 * x12);
    let r23 = 0.5 / x23 + c * (x23 / (x13 * x12) - x13 / (x12 * x23) - x12 / (x23 * x13))
        - c * (k2f - 1.0) * x2 / (x23 * x23);
    let r13 = 0.5 / x13 + k2f * c * (x13 / (x12 * x23) - x12 / (x13 * x23) - x23 / (x12 * x13));
    let dims = [k2f * (k2f - 1.0) / 2.0, k2f, k3f, k2f * k3f];
    Ok(RicciData::from_components(vec![r2, r12, r13, r23], &dims))
}

pub fn scalar_stiefel_block(k2: u32, k3: u32, g: &Metric) -> Result<f64> {
    let x = check(g, 4)?;
    let (x2, x12, x13, x23) = (x[0], x[1], x[2], x[3]);
    let (k2f, k3f) = (k2 as f64, k3 as f64);
    let den = 2.0 * (k2f + k3f - 1.0);
    let a222 = k2f * (k2f - 1.0) * (k2f - 2.0) / den;
    let a2_12 = k2f * (k2f - 1.0) / den;
    let a2_23 = k2f * k3f * (k2f - 1.0) / den;
    let a_mixed = k2f * k3f / den;
    let dims = [k2f * (k2f - 1.0) / 2.0, k2f, k3f, k2f * k3f];
    Ok(0.5 * (dims[0] / x2 + dims[1] / x12 + dims[2] / x13 + dims[3] / x23)
        - (a222 + 2.0 * a2_12 + 2.0 * a2_23) / (4.0 * x2)
        - 0.25 * (a2_12 * x2 / (x12 * x12) + a2_23 * x2 / (x23 * x23))
        - 0.5 * a_mixed * (x12 / (x13 * x23) + x13 / (x12 * x23) + x23 / (x12 * x13)))
}

struct FlagConsts {
    d: [f64; 4],
    a112: f64,
    a123: f64,
    a134: f64,
    a224: f64,
}

fn flag_consts(id: FlagId) -> FlagConsts {
    let iso = catalog_lookup(&SpaceSpec::flag(id)).expect("flag data");
    let f = |i, j, k| q_to_f64(&iso.a(i, j, k));
    FlagConsts {
        d: [0, 1, 2, 3].map(|i| iso.dims[i] as f64),
        a112: f(0, 0, 1),
        a123: f(0, 1, 2),
        a134: f(0, 2, 3),
        a224: f(1, 1, 3),
    }
}

/// Four-summand flag manifold components.
pub fn ricci_flag4(id: FlagId, g: &Metric) -> Result<RicciData> {
    let x = check(g, 4)?;
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    let FlagConsts {
        d,
        a112,
        a123,
        a134,
        a224,
    } = flag_consts(id);
    let r1 = 0.5 / x1 - a112 / (2.0 * d[0]) * x2 / (x1 * x1)
        + a123 / (2.0 * d[0]) * (x1 / (x2 * x3) - x2 / (x1 * x3) - x3 / (x1 * x2))
        + a134 / (2.0 * d[0]) * (x1 / (x3 * x4) - x3 / (x1 * x4) - x4 / (x1 * x3));
    let r2 = 0.5 / x2 - a224 / (2.0 * d[1]) * x4 / (x2 * x2)
        + a112 / (4.0 * d[1]) * (x2 / (x1 * x1) - 2.0 / x2)
        + a123 / (2.0 * d[1]) * (x2 / (x1 * x3) - x1 / (x2 * x3) - x3 / (x1 * x2));
    let r3 = 0.5 / x3
        + a123 / (2.0 * d[2]) * (x3 / (x1 * x2) - x2 / (x1 * x3) - x1 / (x2 * x3))
        + a134 / (2.0 * d[2]) * (x3 / (x1 * x4) - x1 / (x3 * x4) - x4 / (x1 * x3));
    let r4 = 0.5 / x4
        + a224 / (4.0 * d[3]) * (x4 / (x2 * x2) - 2.0 / x4)
        + a134 / (2.0 * d[3]) * (x4 / (x1 * x3) - x1 / (x3 * x4) - x3 / (x1 * x4));
    Ok(RicciData::from_components(vec![r1, r2, r3, r4], &d))
}

pub fn scalar_flag4(id: FlagId, g: &Metric) -> Result<f64> {
    let x = check(g, 4)?;
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    let FlagConsts {
        d,
        a112,
        a123,
        a134,
        a224,
    } = flag_consts(id);
    Ok(0.5 * (d[0] / x1 + d[1] / x2 + d[2] / x3 + d[3] / x4)
        + 0.25 * a112 * (-2.0 / x2 - x2 / (x1 * x1))
        + 0.5 * a123 * (-x1 / (x2 * x3) - x2 / (x1 * x3) - x3 / (x1 * x2))
        + 0.25 * a224 * (-2.0 / x4 - x4 / (x2 * x2))
        + 0.5 * a134 * (-x1 / (x3 * x4) - x3 / (x1 * x4) - x4 / (x1 * x3)))
}

/// Family-specific components for any cataloged space.
pub fn ricci_specialized(spec: &SpaceSpec, g: &Metric) -> Result<RicciData> {
    match *spec {
        SpaceSpec::Gws { .. } => {
            let iso = catalog_lookup(spec)?;
            let a = iso.wallach_a.as_ref().expect("Wallach constants");
            let d = dims_f64(&iso);
            ricci_wallach(
                [q_to_f64(&a[0]), q_to_f64(&a[1]), q_to_f64(&a[2])],
                [d[0], d[1], d[2]],
                g,
            )
        }
        SpaceSpec::StiefelV2 { n } => {
            spec.validate()?;
            ricci_v2(n, g)
        }
        SpaceSpec::StiefelBlock { k2, k3, .. } => {
            spec.validate()?;
            ricci_stiefel_block(k2, k3, g)
        }
        SpaceSpec::Flag4(id) => ricci_flag4(id, g),
    }
}

/// Family-specific scalar curvature display.
pub fn scalar_specialized(spec: &SpaceSpec, g: &Metric) -> Result<f64> {
    match *spec {
        SpaceSpec::Gws { .. } => {
            let iso = catalog_lookup(spec)?;
            let d = dims_f64(&iso);
            scalar_wallach(q_to_f64(&iso.a(0, 1, 2)), [d[0], d[1], d[2]], g)
        }
        SpaceSpec::StiefelV2 { n } => scalar_v2(n, g),
        SpaceSpec::StiefelBlock { k2, k3, .. } => scalar_stiefel_block(k2, k3, g),
        SpaceSpec::Flag4(id) => scalar_flag4(id, g),
    }
}

/// Manifold dimension as a float.
pub fn n_dim(iso: &IsotropyData) -> f64 {
    iso.n_dim().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn rejects_nonpositive() {
        assert_eq!(Metric::new(vec![1.0, 0.0, 2.0]), Err(Error::NonPositiveMetric(1)));
        assert_eq!(Metric::new(vec![1.0, f64::NAN]), Err(Error::NonPositiveMetric(1)));
    }

    #[test]
    fn dimension_mismatch() {
        let iso = catalog_lookup(&SpaceSpec::gws(7)).unwrap();
        let g = Metric::new(vec![1.0; 4]).unwrap();
        assert!(matches!(ricci_general(&iso, &g), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gws7_unit_metric() {
        let iso = catalog_lookup(&SpaceSpec::gws(7)).unwrap();
        let g = Metric::new(vec![1.0; 3]).unwrap();
        let r = ricci_general(&iso, &g).unwrap();
        for c in &r.components {
            assert!(close(*c, 5.0 / 12.0, 1e-15));
        }
        // trace: 3 * 16 * 5/12
        assert!(close(r.scalar, 20.0, 1e-14));
        assert!(close(scalar_general(&iso, &g).unwrap(), 20.0, 1e-14));
        let w = ricci_wallach([1.0 / 6.0; 3], [16.0; 3], &g).unwrap();
        assert!(close(w.components[0], 5.0 / 12.0, 1e-15));
    }

    #[test]
    fn exact_matches_float() {
        let iso = catalog_lookup(&SpaceSpec::flag(FlagId::E7)).unwrap();
        let xq = [q(1, 1), q(3, 2), q(7, 5), q(2, 3)];
        let (r, s) = ricci_exact(&iso, &xq).unwrap();
        let g = Metric::new(xq.iter().map(q_to_f64).collect()).unwrap();
        let rf = ricci_general(&iso, &g).unwrap();
        for (a, b) in r.iter().zip(&rf.components) {
            assert!(close(q_to_f64(a), *b, 1e-14));
        }
        assert!(close(q_to_f64(&s), rf.scalar, 1e-14));
    }

    #[test]
    fn v2_einstein_value() {
        let g = Metric::new(vec![1.0, 2.0 / 3.0, 2.0 / 3.0]).unwrap();
        let r = ricci_v2(5, &g).unwrap();
        assert!(r.einstein_residual < 1e-14);
    }

    #[test]
    fn v2_scalar_at_unit_metric() {
        // n = 4, d = (1, 2, 2), A_012 = 1/2: S = (1+2+2)/2 - (1/4)(6 * 1/2)
        let g = Metric::new(vec![1.0; 3]).unwrap();
        assert!(close(scalar_v2(4, &g).unwrap(), 2.5 - 0.75, 1e-15));
        let iso = catalog_lookup(&SpaceSpec::v2(4)).unwrap();
        assert!(close(scalar_general(&iso, &g).unwrap(), 1.75, 1e-15));
    }

    #[test]
    fn stiefel_einstein_metrics() {
        for x in [[1.27429, 1.27429, 1.0, 1.0], [0.245146, 1.01652, 0.253386, 1.0]] {
            let g = Metric::new(x.to_vec()).unwrap();
            let r = ricci_stiefel_block(4, 2, &g).unwrap();
            assert!(r.einstein_residual < 1e-4, "{:?}", r);
        }
    }

    #[test]
    fn kahler_flag_metric() {
        for id in FlagId::ALL {
            let g = Metric::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
            let r = ricci_flag4(id, &g).unwrap();
            assert!(r.einstein_residual < 1e-10, "{:?}", id);
        }
    }

    #[test]
    fn e8a3_listed_metric() {
        let g = Metric::new(vec![1.0, 0.6496, 1.1094, 1.0610]).unwrap();
        let r = ricci_flag4(FlagId::E8a3, &g).unwrap();
        assert!(r.einstein_residual < 1e-3);
    }

    #[test]
    fn gws6_table_metric() {
        let g = Metric::new(vec![1.0, 0.6, 0.8]).unwrap();
        let r = ricci_specialized(&SpaceSpec::gws(6), &g).unwrap();
        assert!(r.einstein_residual < 1e-4);
    }
}
