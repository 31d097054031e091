//! Poincaré compactification in the affine charts of the sphere.
//!
//! For a field `P` of degree `d` on `R^q`, chart `U_k` (`k <= q`) uses
//! coordinates `z = (x without x_k, 1) / x_k`, so the last coordinate
//! `z_q = 1/x_k` vanishes exactly at infinity. The compactified field is
//!
//! ```text
//! z_i' = z_q^d (P_j(x) - z_i P_k(x)),    z_q' = -z_q^(d+1) P_k(x)
//! ```
//!
//! written as a polynomial in `z` with the `1/Delta^(d-1)` factor dropped.
//! Chart `U_(q+1)` returns `P` itself and each `V_k` equals `(-1)^(d-1) U_k`.

use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{qi, Monomial, MultiPoly, PolyVectorField, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ChartKind {
    U,
    V,
}

/// Chart `U_index` or `V_index` on the sphere of dimension `dim`, with
/// `1 <= index <= dim + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    pub kind: ChartKind,
    pub index: usize,
    pub dim: usize,
}

impl Chart {
    pub fn new(kind: ChartKind, index: usize, dim: usize) -> Result<Self> {
        if index == 0 || index > dim + 1 {
            return Err(Error::ChartDomain(format!("index {} for dimension {}", index, dim)));
        }
        Ok(Chart { kind, index, dim })
    }

    pub fn u(index: usize, dim: usize) -> Self {
        Chart::new(ChartKind::U, index, dim).expect("valid chart index")
    }

    pub fn v(index: usize, dim: usize) -> Self {
        Chart::new(ChartKind::V, index, dim).expect("valid chart index")
    }

    pub fn is_last(&self) -> bool {
        self.index == self.dim + 1
    }

    /// Source coordinate of chart coordinate `i` (both 0-based) for `i < dim - 1`.
    fn source(&self, i: usize) -> usize {
        let k = self.index - 1;
        if i < k {
            i
        } else {
            i + 1
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            ChartKind::U => "U",
            ChartKind::V => "V",
        };
        write!(f, "{}{}", k, self.index)
    }
}

impl Serialize for Chart {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Coordinates in a chart; the last entry is zero exactly at infinity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartPoint {
    pub z: Vec<f64>,
}

impl ChartPoint {
    pub fn delta(&self) -> f64 {
        (self.z.iter().map(|v| v * v).sum::<f64>() + 1.0).sqrt()
    }

    pub fn at_infinity(&self) -> bool {
        self.z.last().map_or(false, |v| *v == 0.0)
    }
}

/// Compactified field of `field` in `chart`, using the field's own degree.
pub fn compactified_field(field: &PolyVectorField, chart: Chart) -> Result<PolyVectorField> {
    compactified_field_with_degree(field, chart, field.degree())
}

/// As [`compactified_field`] with an explicit degree `d`, which must bound
/// every component's degree.
pub fn compactified_field_with_degree(field: &PolyVectorField, chart: Chart, d: u32) -> Result<PolyVectorField> {
    let q = field.len();
    if field.nvars() != q || chart.dim != q {
        return Err(Error::DimensionMismatch {
            expected: chart.dim,
            got: field.nvars().max(q),
        });
    }
    if field.degree() > d {
        return Err(Error::DegreeMismatch(format!(
            "field has degree {} but degree {} was requested",
            field.degree(),
            d
        )));
    }
    let u = if chart.is_last() {
        field.clone()
    } else {
        u_chart(field, chart.index - 1, d)
    };
    Ok(match chart.kind {
        ChartKind::U => u,
        ChartKind::V => {
            if d % 2 == 1 {
                u
            } else {
                u.scale(&qi(-1))
            }
        }
    })
}

fn u_chart(field: &PolyVectorField, k: usize, d: u32) -> PolyVectorField {
    let q = field.len();
    let chart = Chart::u(k + 1, q);
    // homogenized P_i(1/z_q, z/z_q) * z_q^d
    let lift = |p: &MultiPoly| -> MultiPoly {
        let mut out = MultiPoly::zero(q);
        for (m, c) in p.terms() {
            let mut e = vec![0u32; q];
            for i in 0..q - 1 {
                e[i] = m.0[chart.source(i)];
            }
            e[q - 1] = d - m.degree();
            out.add_term(Monomial(e), c.clone());
        }
        out
    };
    let lifted: Vec<MultiPoly> = field.components.iter().map(lift).collect();
    let pk = &lifted[k];
    let mut comps = Vec::with_capacity(q);
    for i in 0..q - 1 {
        let zi_pk = pk.mul_monomial(&unit(q, i), &Q::one());
        comps.push(&lifted[chart.source(i)] - &zi_pk);
    }
    comps.push(-pk.mul_monomial(&unit(q, q - 1), &Q::one()));
    PolyVectorField::new(comps)
}

fn unit(q: usize, i: usize) -> Monomial {
    let mut e = vec![0; q];
    e[i] = 1;
    Monomial(e)
}

/// Restriction of a compactified field to the slice at infinity: set the
/// last coordinate to zero and drop the last component.
pub fn infinity_system(cfield: &PolyVectorField) -> PolyVectorField {
    let q = cfield.nvars();
    PolyVectorField::new(
        cfield.components[..q - 1]
            .iter()
            .map(|p| p.restrict_zero(q - 1))
            .collect(),
    )
}

/// Chart coordinates of the finite point `x`.
pub fn chart_coords(x: &[f64], chart: Chart) -> Result<ChartPoint> {
    if x.len() != chart.dim {
        return Err(Error::DimensionMismatch {
            expected: chart.dim,
            got: x.len(),
        });
    }
    if chart.is_last() {
        return match chart.kind {
            ChartKind::U => Ok(ChartPoint { z: x.to_vec() }),
            ChartKind::V => Err(Error::ChartDomain(format!("{} contains no finite points", chart))),
        };
    }
    let k = chart.index - 1;
    let xk = x[k];
    let inside = match chart.kind {
        ChartKind::U => xk > 0.0,
        ChartKind::V => xk < 0.0,
    };
    if !inside || !xk.is_finite() {
        return Err(Error::ChartDomain(format!("{}: x_{} = {}", chart, chart.index, xk)));
    }
    let q = chart.dim;
    let mut z: Vec<f64> = (0..q - 1).map(|i| x[chart.source(i)] / xk).collect();
    z.push(1.0 / xk);
    Ok(ChartPoint { z })
}

/// Finite point with the given chart coordinates.
pub fn chart_inverse(p: &ChartPoint, chart: Chart) -> Result<Vec<f64>> {
    let z = &p.z;
    if z.len() != chart.dim {
        return Err(Error::DimensionMismatch {
            expected: chart.dim,
            got: z.len(),
        });
    }
    if chart.is_last() {
        return match chart.kind {
            ChartKind::U => Ok(z.clone()),
            ChartKind::V => Err(Error::ChartDomain(format!("{} contains no finite points", chart))),
        };
    }
    let q = chart.dim;
    let zq = z[q - 1];
    let ok = match chart.kind {
        ChartKind::U => zq > 0.0,
        ChartKind::V => zq < 0.0,
    };
    if !ok {
        return Err(Error::ChartDomain(format!(
            "{}: point at infinity or wrong side",
            chart
        )));
    }
    let mut x = vec![0.0; q];
    x[chart.index - 1] = 1.0 / zq;
    for i in 0..q - 1 {
        x[chart.source(i)] = z[i] / zq;
    }
    Ok(x)
}
