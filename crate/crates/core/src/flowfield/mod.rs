//! Normalized Ricci flow: numeric right-hand side and the polynomial vector
//! field obtained by clearing denominators.

pub mod transcribed;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::curvature::{ricci_general, Metric};
use crate::error::{Error, Result};
use crate::poly::{qi, Monomial, MultiPoly, PolyVectorField, Q};
use crate::spaces::{catalog_lookup, IsotropyData, SpaceSpec};

pub use transcribed::{printed_chart_system, printed_infinity_system, transcribed_system};

/// `v_i = x_i (-2 r_i + 2 S / n)`.
pub fn flow_rhs(iso: &IsotropyData, g: &Metric, n_dim: f64) -> Result<Vec<f64>> {
    let ric = ricci_general(iso, g)?;
    let s = ric.scalar;
    Ok(g.coords()
        .iter()
        .zip(&ric.components)
        .map(|(x, r)| x * (-2.0 * r + 2.0 * s / n_dim))
        .collect())
}

/// Sign placed in front of the Ricci term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `x_i (-2 r_i + 2 S / n)`, the volume-preserving flow.
    Normalized,
    /// `x_i (2 r_i + 2 S / n)`, the form the printed systems are built from.
    Printed,
}

/// Laurent polynomial with rational coefficients.
#[derive(Clone, Debug, Default)]
struct Laurent {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, Q>,
}

impl Laurent {
    fn new(nvars: usize) -> Self {
        Laurent {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    fn add(&mut self, e: Vec<i32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// `c * x_a / (x_b x_c)` and similar ratios given as signed exponent steps.
    fn add_ratio(&mut self, up: &[usize], down: &[usize], c: Q) {
        let mut e = vec![0i32; self.nvars];
        for &i in up {
            e[i] += 1;
        }
        for &i in down {
            e[i] -= 1;
        }
        self.add(e, c);
    }

    fn scaled(&self, c: &Q) -> Laurent {
        let mut out = Laurent::new(self.nvars);
        for (e, v) in &self.terms {
            out.add(e.clone(), v * c);
        }
        out
    }

    fn plus(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, v) in &other.terms {
            out.add(e.clone(), v.clone());
        }
        out
    }

    fn shift(&self, by: &[i32]) -> Laurent {
        let mut out = Laurent::new(self.nvars);
        for (e, v) in &self.terms {
            out.add(e.iter().zip(by).map(|(a, b)| a + b).collect(), v.clone());
        }
        out
    }

    fn into_poly(self) -> Option<MultiPoly> {
        let mut p = MultiPoly::zero(self.nvars);
        for (e, v) in self.terms {
            if e.iter().any(|&x| x < 0) {
                return None;
            }
            p.add_term(Monomial(e.into_iter().map(|x| x as u32).collect()), v);
        }
        Some(p)
    }
}

/// `x_k r_k` for every `k` and the scalar curvature `S`, as Laurent polynomials.
fn ricci_laurent(iso: &IsotropyData) -> (Vec<Laurent>, Laurent) {
    let q = iso.q;
    let d = iso.dims_q();
    let mut xr = Vec::with_capacity(q);
    for k in 0..q {
        let mut l = Laurent::new(q);
        l.add(vec![0; q], Q::new(1.into(), 2.into()));
        for j in 0..q {
            for i in 0..q {
                let ajik = iso.a(j, i, k);
                if ajik.is_zero() {
                    continue;
                }
                l.add_ratio(&[k, k], &[j, i], &ajik / (qi(4) * &d[k]));
                l.add_ratio(&[j], &[i], -(&ajik / (qi(2) * &d[k])));
            }
        }
        xr.push(l);
    }
    let mut s = Laurent::new(q);
    for i in 0..q {
        s.add_ratio(&[], &[i], &d[i] / qi(2));
    }
    for i in 0..q {
        for j in 0..q {
            for k in 0..q {
                let a = iso.a(i, j, k);
                if !a.is_zero() {
                    s.add_ratio(&[k], &[i, j], -(a / qi(4)));
                }
            }
        }
    }
    (xr, s)
}

/// Constant and monomial whose product clears the denominators of the flow.
pub fn clearing_factor(spec: &SpaceSpec) -> Result<(Q, Vec<u32>)> {
    spec.validate()?;
    let iso = catalog_lookup(spec)?;
    let out = match *spec {
        SpaceSpec::Gws { .. } => (qi(iso.n_dim() as i64), vec![1, 1, 1]),
        SpaceSpec::StiefelV2 { n } => {
            let n = n as i64;
            (qi(2 * (n - 2) * (2 * n - 3)), vec![1, 1, 1])
        }
        SpaceSpec::StiefelBlock { k2, k3, .. } => {
            let (k2, k3) = (k2 as i64, k3 as i64);
            (qi(2 * (k2 + 1) * (k2 + k3 - 1) * (-k2 - 2 * k3)), vec![1, 2, 1, 2])
        }
        SpaceSpec::Flag4(_) => {
            let prod: i64 = iso.dims.iter().map(|&d| d as i64).product();
            (qi(prod * iso.n_dim() as i64), vec![2, 2, 1, 1])
        }
    };
    Ok(out)
}

/// Flow field times the clearing factor, as exact polynomials.
pub fn polynomial_system_with(spec: &SpaceSpec, conv: Convention) -> Result<PolyVectorField> {
    let (c, mono) = clearing_factor(spec)?;
    let iso = catalog_lookup(spec)?;
    let q = iso.q;
    let n = qi(iso.n_dim() as i64);
    let (xr, s) = ricci_laurent(&iso);
    let sign = match conv {
        Convention::Normalized => qi(-2),
        Convention::Printed => qi(2),
    };
    let s_term = s.scaled(&(qi(2) / &n));
    let shift: Vec<i32> = mono.iter().map(|&e| e as i32).collect();
    let mut comps = Vec::with_capacity(q);
    for (k, xrk) in xr.iter().enumerate() {
        let mut unit = vec![0i32; q];
        unit[k] = 1;
        let field = xrk.scaled(&sign).plus(&s_term.shift(&unit));
        let cleared = field.shift(&shift).scaled(&c);
        let p = cleared
            .into_poly()
            .ok_or_else(|| Error::NonPolynomialResult(format!("{}: component {} keeps a denominator", spec, k + 1)))?;
        comps.push(p);
    }
    Ok(PolyVectorField::new(comps))
}

/// Polynomial field of the normalized flow, multiplied by the clearing factor.
pub fn polynomial_system(spec: &SpaceSpec) -> Result<PolyVectorField> {
    polynomial_system_with(spec, Convention::Normalized)
}

/// Sign of the clearing constant (`-1` for Stiefel block spaces).
pub fn clearing_sign(spec: &SpaceSpec) -> Result<i32> {
    let (c, _) = clearing_factor(spec)?;
    Ok(if c.is_negative() { -1 } else { 1 })
}

/// `polynomial_system` rescaled to a positive multiple of the normalized flow.
pub fn oriented_system(spec: &SpaceSpec) -> Result<PolyVectorField> {
    let p = polynomial_system(spec)?;
    Ok(if clearing_sign(spec)? < 0 { p.scale(&qi(-1)) } else { p })
}

/// The constant `c` with `transcribed_system = c * polynomial_system_with(Printed)`.
pub fn printed_constant(spec: &SpaceSpec) -> Result<Option<Q>> {
    let built = polynomial_system_with(spec, Convention::Printed)?;
    let printed = transcribed_system(spec)?;
    Ok(printed.proportionality(&built))
}

/// Positive scalar `lambda(x)` with `oriented_system(x) = lambda(x) * flow_rhs(x)`.
pub fn clearing_value(spec: &SpaceSpec, x: &[f64]) -> Result<f64> {
    let (c, mono) = clearing_factor(spec)?;
    let m = Monomial(mono).eval_f64(x);
    Ok(crate::poly::q_to_f64(&c.abs()) * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, q_to_f64};
    use crate::spaces::FlagId;

    #[test]
    fn gws7_fixed_point() {
        let iso = catalog_lookup(&SpaceSpec::gws(7)).unwrap();
        let v = flow_rhs(&iso, &Metric::new(vec![1.0; 3]).unwrap(), 48.0).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn kahler_einstein_flag_is_stationary() {
        let spec = SpaceSpec::flag(FlagId::F4);
        let iso = catalog_lookup(&spec).unwrap();
        let g = Metric::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let v = flow_rhs(&iso, &g, iso.n_dim() as f64).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-10), "{:?}", v);
    }

    #[test]
    fn degrees() {
        assert_eq!(polynomial_system(&SpaceSpec::gws(7)).unwrap().degree(), 3);
        assert_eq!(polynomial_system(&SpaceSpec::v2(6)).unwrap().degree(), 3);
        assert_eq!(polynomial_system(&SpaceSpec::stiefel(4, 2)).unwrap().degree(), 6);
        assert_eq!(polynomial_system(&SpaceSpec::flag(FlagId::F4)).unwrap().degree(), 6);
        for s in SpaceSpec::catalog() {
            assert!(polynomial_system(&s).unwrap().is_homogeneous(), "{}", s);
        }
    }

    #[test]
    fn matches_numeric_flow_up_to_clearing_factor() {
        let x = [0.7, 1.3, 2.1, 0.9];
        for spec in SpaceSpec::catalog() {
            let iso = catalog_lookup(&spec).unwrap();
            let x = &x[..iso.q];
            let v = flow_rhs(&iso, &Metric::new(x.to_vec()).unwrap(), iso.n_dim() as f64).unwrap();
            let p = oriented_system(&spec).unwrap().eval_f64(x);
            let lam = clearing_value(&spec, x).unwrap();
            for (a, b) in p.iter().zip(&v) {
                assert!(
                    (a - lam * b).abs() <= 1e-9 * a.abs().max(1.0),
                    "{}: {} vs {}",
                    spec,
                    a,
                    lam * b
                );
            }
        }
    }

    #[test]
    fn gws_printed_constant_is_one() {
        let c = printed_constant(&SpaceSpec::gws_klm(1, 2, 3, 4)).unwrap();
        assert_eq!(c, Some(qi(1)));
    }

    #[test]
    fn printed_constants_per_family() {
        assert_eq!(printed_constant(&SpaceSpec::v2(7)).unwrap(), Some(q(1, 2)));
        assert_eq!(printed_constant(&SpaceSpec::stiefel(4, 3)).unwrap(), Some(qi(-1)));
        assert_eq!(printed_constant(&SpaceSpec::flag(FlagId::E8a6)).unwrap(), Some(qi(2)));
        assert_eq!(printed_constant(&SpaceSpec::gws(14)).unwrap(), Some(qi(1)));
    }

    #[test]
    fn normalized_build_is_not_the_printed_one() {
        let spec = SpaceSpec::gws(7);
        let built = polynomial_system(&spec).unwrap();
        assert!(transcribed_system(&spec).unwrap().proportionality(&built).is_none());
    }

    #[test]
    fn exact_volume_identity() {
        // sum d_i v_i / x_i = 0, checked on the cleared field at a rational point
        let spec = SpaceSpec::stiefel(3, 2);
        let iso = catalog_lookup(&spec).unwrap();
        let x = [q(3, 2), q(2, 5), q(7, 3), q(5, 4)];
        let p = polynomial_system(&spec).unwrap().eval_q(&x);
        let s = p
            .iter()
            .zip(&x)
            .zip(&iso.dims)
            .map(|((pi, xi), &d)| pi / xi * qi(d as i64))
            .fold(Q::zero(), |a, b| a + b);
        assert!(s.is_zero(), "{}", q_to_f64(&s));
    }
}
