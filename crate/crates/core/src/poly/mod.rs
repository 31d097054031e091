//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic, so iteration and serialization are canonical.

mod json;
mod parse;

pub use json::{decode_field, encode_field, TermJson};
pub use parse::{parse_poly, Parser};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exact conversion of a finite double to a rational.
pub fn q_from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite value")
}

pub fn q_to_f64(x: &Q) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // huge numerator or denominator: scale both down first
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(900);
            let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| v.powi(*e as i32))
            .product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exps: Vec<u32>, c: Q) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(Monomial(exps), c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, Q)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Q {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.coeff(&vec![0; self.nvars]))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, Q::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| q_to_f64(c) * m.eval_f64(x)).sum()
    }

    pub fn eval_q(&self, x: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (e, v) in m.0.iter().zip(x) {
                for _ in 0..*e {
                    t *= v;
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute polynomial `subs[i]` (all in a common ring) for variable `i`.
    pub fn compose(&self, subs: &[MultiPoly]) -> MultiPoly {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<MultiPoly>> = subs
            .iter()
            .map(|p| vec![MultiPoly::constant(target, Q::one()), p.clone()])
            .collect();
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, e) in m.0.iter().enumerate() {
                let e = *e as usize;
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    t = &t * &powers[i][e];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Substitute exact values for a subset of variables, keeping the ring.
    pub fn substitute(&self, values: &[Option<Q>]) -> MultiPoly {
        assert_eq!(values.len(), self.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let mut v = c.clone();
            for (i, val) in values.iter().enumerate() {
                if let Some(val) = val {
                    for _ in 0..e[i] {
                        v *= val;
                    }
                    e[i] = 0;
                }
            }
            out.add_term(Monomial(e), v);
        }
        out
    }

    /// Drop variable `idx` after setting it to zero.
    pub fn restrict_zero(&self, idx: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            if m.0[idx] == 0 {
                let mut e = m.0.clone();
                e.remove(idx);
                out.add_term(Monomial(e), c.clone());
            }
        }
        out
    }

    /// Keep only the variables listed in `keep`, which must cover every variable
    /// occurring in the polynomial.
    pub fn select_vars(&self, keep: &[usize]) -> MultiPoly {
        let mut out = MultiPoly::zero(keep.len());
        for (m, c) in &self.terms {
            debug_assert!(m.0.iter().enumerate().all(|(i, e)| *e == 0 || keep.contains(&i)));
            out.add_term(Monomial(keep.iter().map(|&i| m.0[i]).collect()), c.clone());
        }
        out
    }

    /// New variable `j` is old variable `perm[j]`.
    pub fn permute_vars(&self, perm: &[usize]) -> MultiPoly {
        assert_eq!(perm.len(), self.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; self.nvars];
            for (j, &i) in perm.iter().enumerate() {
                e[j] = m.0[i];
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    pub fn partial(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut ex = m.0.clone();
                ex[i] -= 1;
                out.add_term(Monomial(ex), c * qi(e as i64));
            }
        }
        out
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.0.clone(),
            None => return Monomial::one(self.nvars),
        };
        let g = it.fold(first, |acc, m| acc.iter().zip(&m.0).map(|(a, b)| *a.min(b)).collect());
        Monomial(g)
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<MultiPoly> {
        let mut out = MultiPoly::zero(self.nvars);
        for (k, c) in &self.terms {
            if !m.divides(k) {
                return None;
            }
            let e = k.0.iter().zip(&m.0).map(|(a, b)| a - b).collect();
            out.add_term(Monomial(e), c.clone());
        }
        Some(out)
    }

    pub fn max_abs_coeff(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }

    /// Leading coefficient in graded-lex order.
    pub fn leading_coeff(&self) -> Option<&Q> {
        self.terms.values().next_back()
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self.terms.iter().map(|(m, c)| (m.0.clone(), q_to_f64(c))).collect(),
        }
    }

    pub fn fmt_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.degree() == 0 {
                if a.is_integer() {
                    factors.push(a.to_string());
                } else {
                    factors.push(format!("({})", a));
                }
            }
            for (j, e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[j].to_string()),
                    _ => factors.push(format!("{}^{}", names[j], e)),
                }
            }
            s.push_str(&factors.join(" "));
        }
        s
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.fmt_with(&refs))
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Q::one())
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Floating-point image of a [`MultiPoly`] for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(e, c)| c * mono(e, x)).sum()
    }

    /// Value together with the sum of absolute term magnitudes.
    pub fn eval_with_scale(&self, x: &[f64]) -> (f64, f64) {
        let mut v = 0.0;
        let mut s = 0.0;
        for (e, c) in &self.terms {
            let t = c * mono(e, x);
            v += t;
            s += t.abs();
        }
        (v, s)
    }

    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for (e, c) in &self.terms {
            for i in 0..e.len() {
                if e[i] == 0 {
                    continue;
                }
                let mut t = c * e[i] as f64;
                for (j, &ej) in e.iter().enumerate() {
                    let p = if j == i { ej - 1 } else { ej };
                    if p > 0 {
                        t *= x[j].powi(p as i32);
                    }
                }
                out[i] += t;
            }
        }
    }
}

fn mono(e: &[u32], x: &[f64]) -> f64 {
    let mut t = 1.0;
    for (k, &p) in e.iter().enumerate() {
        if p > 0 {
            t *= x[k].powi(p as i32);
        }
    }
    t
}

/// Ordered list of polynomial components sharing one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    pub components: Vec<MultiPoly>,
}

impl PolyVectorField {
    pub fn new(components: Vec<MultiPoly>) -> Self {
        if let Some(first) = components.first() {
            assert!(components.iter().all(|c| c.nvars() == first.nvars()));
        }
        PolyVectorField { components }
    }

    pub fn nvars(&self) -> usize {
        self.components.first().map(MultiPoly::nvars).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().filter_map(MultiPoly::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.components
            .iter()
            .all(|c| c.is_homogeneous() && c.degree().map_or(true, |e| e == d))
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_f64(x)).collect()
    }

    pub fn eval_q(&self, x: &[Q]) -> Vec<Q> {
        self.components.iter().map(|c| c.eval_q(x)).collect()
    }

    pub fn scale(&self, c: &Q) -> Self {
        PolyVectorField::new(self.components.iter().map(|p| p.scale(c)).collect())
    }

    /// Relabel coordinates: new coordinate `j` is old coordinate `perm[j]`,
    /// applied both to the variables and to the order of components.
    pub fn permute(&self, perm: &[usize]) -> Self {
        PolyVectorField::new(perm.iter().map(|&i| self.components[i].permute_vars(perm)).collect())
    }

    pub fn compile(&self) -> Vec<CompiledPoly> {
        self.components.iter().map(MultiPoly::compile).collect()
    }

    /// The constant `c` with `self = c * other`, if one exists.
    pub fn proportionality(&self, other: &PolyVectorField) -> Option<Q> {
        let ratios = self.component_ratios(other)?;
        let mut it = ratios.into_iter().flatten();
        let c = it.next()?;
        if it.all(|r| r == c) {
            Some(c)
        } else {
            None
        }
    }

    /// Per-component constants `c_i` with `self_i = c_i * other_i`
    /// (`None` entries for components that vanish identically in both).
    pub fn component_ratios(&self, other: &PolyVectorField) -> Option<Vec<Option<Q>>> {
        if self.len() != other.len() || self.nvars() != other.nvars() {
            return None;
        }
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.components.iter().zip(&other.components) {
            if a.is_zero() && b.is_zero() {
                out.push(None);
                continue;
            }
            if a.len() != b.len() {
                return None;
            }
            let mut ratio: Option<Q> = None;
            for ((ma, ca), (mb, cb)) in a.terms().zip(b.terms()) {
                if ma != mb {
                    return None;
                }
                let r = ca / cb;
                match &ratio {
                    None => ratio = Some(r),
                    Some(x) if *x == r => {}
                    Some(_) => return None,
                }
            }
            out.push(ratio);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(3, i)
    }

    #[test]
    fn grlex_orders_by_degree_first() {
        let a = Monomial(vec![0, 0, 2]);
        let b = Monomial(vec![1, 0, 0]);
        let c = Monomial(vec![0, 1, 1]);
        assert!(b < a);
        assert!(c > a);
        assert!(Monomial(vec![2, 0, 0]) > Monomial(vec![1, 1, 0]));
    }

    #[test]
    fn arithmetic_cancels_exactly() {
        let p = &x(0) + &x(1);
        let m = &x(0) - &x(1);
        let prod = &p * &m;
        let expect = &x(0).pow(2) - &x(1).pow(2);
        assert_eq!(prod, expect);
        assert!((&prod - &expect).is_zero());
    }

    #[test]
    fn compose_and_restrict() {
        let p = &(&x(0) * &x(1)) + &x(2).pow(2);
        let subs = vec![
            MultiPoly::constant(3, qi(1)),
            MultiPoly::var(3, 0),
            MultiPoly::var(3, 2),
        ];
        let c = p.compose(&subs);
        assert_eq!(c, &x(0) + &x(2).pow(2));
        assert_eq!(c.restrict_zero(2), MultiPoly::var(2, 0));
    }

    #[test]
    fn monomial_content_strips_common_factor() {
        let p = &(&x(0) * &x(1)).pow(2) + &(&x(0) * &x(2));
        let m = p.monomial_content();
        assert_eq!(m.0, vec![1, 0, 0]);
        let d = p.div_monomial(&m).unwrap();
        assert_eq!(&d * &x(0), p);
    }

    #[test]
    fn proportional_fields() {
        let f = PolyVectorField::new(vec![&x(0) + &x(1), x(2).pow(3)]);
        let g = f.scale(&q(-3, 7));
        assert_eq!(g.proportionality(&f), Some(q(-3, 7)));
        let h = PolyVectorField::new(vec![g.components[0].clone(), f.components[1].clone()]);
        assert_eq!(h.proportionality(&f), None);
    }

    #[test]
    fn compiled_gradient_matches_exact_partials() {
        let p = &(&x(0).pow(3) * &x(1)) - &(&x(2).pow(2).scale(&q(5, 2)));
        let c = p.compile();
        let pt = [1.5, -0.5, 2.0];
        let mut g = [0.0; 3];
        c.gradient(&pt, &mut g);
        for i in 0..3 {
            assert!((g[i] - p.partial(i).eval_f64(&pt)).abs() < 1e-12);
        }
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let big = Q::new(BigInt::from(10).pow(400), BigInt::from(10).pow(399) * 4);
        assert!((q_to_f64(&big) - 2.5).abs() < 1e-12);
    }
}
