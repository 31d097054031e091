use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Monomial, MultiPoly, PolyVectorField, Q};
use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 4096;
const MAX_VARS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub exponents: Vec<u32>,
    pub numerator: IntRepr,
    pub denominator: IntRepr,
}

/// Integers are written as decimal strings; bare JSON integers are accepted
/// on input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntRepr {
    Text(String),
    Int(i64),
}

impl IntRepr {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            IntRepr::Int(v) => Ok(BigInt::from(*v)),
            IntRepr::Text(s) => {
                let t = s.strip_prefix('-').unwrap_or(s);
                if t.is_empty() || t.len() > 100_000 || !t.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::Decode(format!("not an integer: {:?}", truncate(s))));
                }
                s.parse::<BigInt>()
                    .map_err(|_| Error::Decode(format!("not an integer: {:?}", truncate(s))))
            }
        }
    }
}

fn truncate(s: &str) -> String {
    s.chars().take(32).collect()
}

/// Canonical JSON: components in order, terms in descending graded-lex
/// order, reduced fractions with positive denominators.
pub fn encode_field(f: &PolyVectorField) -> String {
    let comps: Vec<Vec<TermJson>> = f
        .components
        .iter()
        .map(|p| {
            p.terms()
                .rev()
                .map(|(m, c)| TermJson {
                    exponents: m.0.clone(),
                    numerator: IntRepr::Text(c.numer().to_string()),
                    denominator: IntRepr::Text(c.denom().to_string()),
                })
                .collect()
        })
        .collect();
    serde_json::to_string(&comps).expect("serializable")
}

/// Decode the canonical JSON form. Duplicate monomials, zero coefficients,
/// zero denominators and ragged exponent vectors are rejected.
pub fn decode_field(src: &str) -> Result<PolyVectorField> {
    let comps: Vec<Vec<TermJson>> = serde_json::from_str(src).map_err(|e| Error::Decode(e.to_string()))?;
    let nvars = comps
        .iter()
        .flat_map(|c| c.iter())
        .map(|t| t.exponents.len())
        .next()
        .unwrap_or(comps.len());
    if nvars > MAX_VARS {
        return Err(Error::Decode(format!("too many variables: {}", nvars)));
    }
    let mut out = Vec::with_capacity(comps.len());
    for (ci, comp) in comps.iter().enumerate() {
        let mut p = MultiPoly::zero(nvars);
        for t in comp {
            if t.exponents.len() != nvars {
                return Err(Error::Decode(format!(
                    "component {}: exponent vector of length {} (expected {})",
                    ci,
                    t.exponents.len(),
                    nvars
                )));
            }
            if t.exponents.iter().any(|&e| e > MAX_EXPONENT) {
                return Err(Error::Decode(format!("component {}: exponent too large", ci)));
            }
            let n = t.numerator.to_bigint()?;
            let d = t.denominator.to_bigint()?;
            if d.is_zero() {
                return Err(Error::Decode(format!("component {}: zero denominator", ci)));
            }
            if n.is_zero() {
                return Err(Error::Decode(format!("component {}: zero coefficient", ci)));
            }
            let m = Monomial(t.exponents.clone());
            if !p.coeff(&m.0).is_zero() {
                return Err(Error::Decode(format!("component {}: duplicate monomial", ci)));
            }
            let c = Q::new(n, d);
            debug_assert!(c.denom().is_positive());
            p.add_term(m, c);
        }
        out.push(p);
    }
    Ok(PolyVectorField { components: out })
}
