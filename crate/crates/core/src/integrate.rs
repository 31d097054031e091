//! Adaptive integration of the normalized Ricci flow.
//!
//! States are advanced in `w = log x` with the Dormand–Prince 5(4) pair. In
//! these coordinates the flow reads `w_i' = -2 r_i + 2 S / n`, so the volume
//! `sum d_i w_i` is a linear invariant and positivity is automatic.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{GeneralRicci, Metric, RicciData};
use crate::error::{Error, Result};
use crate::flowfield::polynomial_system;
use crate::poly::{q, q_from_f64, q_to_f64, qi, Q};
use crate::rootfind::{find_fixed_points, FixedPointRecord, SearchOptions};
use crate::spaces::{catalog_lookup, SpaceSpec};

/// Declared converged once `|flow_rhs| / |x|` drops below this.
pub const CONVERGED: f64 = 1e-10;
/// Declared degenerate once a coordinate drops below this.
pub const DEGENERATE: f64 = 1e-9;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Reached `t_end`.
    Completed,
    Converged,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    #[serde(serialize_with = "crate::rootfind::serialize_display")]
    pub space: SpaceSpec,
    pub times: Vec<f64>,
    pub states: Vec<Metric>,
    pub volume_log: Vec<f64>,
    pub scalar: Vec<f64>,
    pub einstein_residual: Vec<f64>,
    pub outcome: Outcome,
    /// Final state normalized to `x_1 = 1` when the run converged.
    pub terminal: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &Metric {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn volume_drift(&self) -> f64 {
        let v0 = self.volume_log[0];
        self.volume_log.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max)
    }

    pub fn csv_header(&self) -> String {
        let q = self.states[0].len();
        let mut h = String::from("t");
        for i in 1..=q {
            write!(h, ",x_{}", i).unwrap();
        }
        h.push_str(",volume_log,scalar,einstein_residual");
        h
    }

    /// One row per accepted step, numbers at 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            out.push_str(&sig9(*t));
            for x in self.states[k].coords() {
                out.push(',');
                out.push_str(&sig9(*x));
            }
            for v in [self.volume_log[k], self.scalar[k], self.einstein_residual[k]] {
                out.push(',');
                out.push_str(&sig9(v));
            }
            out.push('\n');
        }
        out
    }
}

/// Shortest decimal form of `x` rounded to 9 significant digits.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r: f64 = format!("{:.8e}", x).parse().unwrap_or(x);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e16) {
        format!("{:e}", r)
    } else {
        r.to_string()
    }
}

struct Flow {
    ricci: GeneralRicci,
    n: f64,
}

impl Flow {
    fn new(spec: &SpaceSpec) -> Result<Self> {
        let iso = catalog_lookup(spec)?;
        let ricci = GeneralRicci::new(&iso);
        let n = ricci.dims().iter().sum();
        Ok(Flow { ricci, n })
    }

    fn ricci(&self, x: &[f64]) -> Result<RicciData> {
        self.ricci.eval(&Metric::new(x.to_vec())?)
    }

    /// `w' = -2 r + 2 S / n` at `w = log x`.
    fn log_rhs(&self, w: &[f64], out: &mut [f64]) -> Result<()> {
        let x: Vec<f64> = w.iter().map(|v| v.exp()).collect();
        let ric = self.ricci(&x)?;
        let s = ric.scalar / self.n;
        for (o, r) in out.iter_mut().zip(&ric.components) {
            *o = 2.0 * (s - r);
        }
        Ok(())
    }

    fn volume_log(&self, x: &[f64]) -> f64 {
        self.ricci.dims().iter().zip(x).map(|(d, v)| d * v.ln()).sum()
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn check_tol(name: &str, v: f64) -> Result<()> {
    if (1e-12..=1e-3).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(format!(
            "{} = {} is outside [1e-12, 1e-3]",
            name, v
        )))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Integrate the normalized flow from `x0` to `t_end` (negative for reverse
/// time), stopping early on convergence or degeneration.
pub fn integrate_flow(spec: &SpaceSpec, x0: &Metric, t_end: f64, rtol: f64, atol: f64) -> Result<Trajectory> {
    spec.validate()?;
    check_tol("rtol", rtol)?;
    check_tol("atol", atol)?;
    if !t_end.is_finite() {
        return Err(Error::ParameterOutOfRange(format!("t_end = {}", t_end)));
    }
    let flow = Flow::new(spec)?;
    let q = spec.q();
    if x0.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            got: x0.len(),
        });
    }

    let mut traj = Trajectory {
        space: *spec,
        times: Vec::new(),
        states: Vec::new(),
        volume_log: Vec::new(),
        scalar: Vec::new(),
        einstein_residual: Vec::new(),
        outcome: Outcome::Completed,
        terminal: None,
    };
    let record = |traj: &mut Trajectory, t: f64, x: Vec<f64>| -> Result<f64> {
        let ric = flow.ricci(&x)?;
        let speed = ric
            .components
            .iter()
            .zip(&x)
            .map(|(r, v)| (v * 2.0 * (ric.scalar / flow.n - r)).powi(2))
            .sum::<f64>()
            .sqrt()
            / norm(&x);
        traj.times.push(t);
        traj.volume_log.push(flow.volume_log(&x));
        traj.scalar.push(ric.scalar);
        traj.einstein_residual.push(ric.einstein_residual);
        traj.states.push(Metric::new(x)?);
        Ok(speed)
    };

    let dir = if t_end < 0.0 { -1.0 } else { 1.0 };
    let span = t_end.abs();
    let mut t = 0.0f64;
    let mut w: Vec<f64> = x0.coords().iter().map(|v| v.ln()).collect();
    let mut k = vec![vec![0.0; q]; 7];
    flow.log_rhs(&w, &mut k[0])?;

    let speed = record(&mut traj, 0.0, x0.coords().to_vec())?;
    if speed < CONVERGED {
        traj.outcome = Outcome::Converged;
    } else if x0.coords().iter().any(|v| *v < DEGENERATE) {
        traj.outcome = Outcome::Degenerate;
    }

    let f0 = norm(&k[0]);
    let mut h = if f0 > 1e-12 {
        (0.01 / f0).min(span)
    } else {
        span.min(1e-2)
    };
    let mut steps = 0;
    let mut tmp = vec![0.0; q];
    let mut w5 = vec![0.0; q];
    while traj.outcome == Outcome::Completed && t < span {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepFailure(dir * t));
        }
        if h < 1e-14 * t.max(1.0) {
            return Err(Error::StepFailure(dir * t));
        }
        h = h.min(span - t);
        for s in 1..7 {
            for i in 0..q {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                tmp[i] = w[i] + dir * h * acc;
            }
            flow.log_rhs(&tmp, &mut k[s])?;
        }
        let mut err = 0.0;
        for i in 0..q {
            let mut acc5 = 0.0;
            let mut acce = 0.0;
            for s in 0..7 {
                acc5 += B[s] * k[s][i];
                acce += E[s] * k[s][i];
            }
            w5[i] = w[i] + dir * h * acc5;
            let sc = atol + rtol * w[i].abs().max(w5[i].abs());
            err += (h * acce / sc).powi(2);
        }
        let err = (err / q as f64).sqrt();
        if err <= 1.0 {
            t += h;
            w.copy_from_slice(&w5);
            k.swap(0, 6);
            let x: Vec<f64> = w.iter().map(|v| v.exp()).collect();
            let degenerate = x.iter().any(|v| *v < DEGENERATE);
            let speed = record(&mut traj, dir * t, x)?;
            if degenerate {
                traj.outcome = Outcome::Degenerate;
            } else if speed < CONVERGED {
                traj.outcome = Outcome::Converged;
            }
        }
        let factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            SAFETY * err.powf(-0.2)
        };
        h *= factor.clamp(MIN_FACTOR, MAX_FACTOR);
    }
    if traj.outcome == Outcome::Converged {
        let x = traj.final_state().coords();
        traj.terminal = Some(x.iter().map(|v| v / x[0]).collect());
    }
    Ok(traj)
}

/// Largest angle, in radians, between the polynomial field and the invariant
/// ray at the sampled ray parameters. The field is evaluated exactly.
pub fn invariant_ray_check(spec: &SpaceSpec, t_samples: &[f64]) -> Result<f64> {
    let dir: Vec<Q> = match *spec {
        SpaceSpec::StiefelV2 { n } => {
            spec.validate()?;
            let n = n as i64;
            vec![q(2 * (n - 2), n - 1), qi(1), qi(1)]
        }
        SpaceSpec::Flag4(_) => (1..=4).map(qi).collect(),
        _ => {
            return Err(Error::ParameterOutOfRange(format!(
                "{} has no tabulated invariant ray",
                spec
            )))
        }
    };
    let field = polynomial_system(spec)?;
    let dir_f: Vec<f64> = dir.iter().map(q_to_f64).collect();
    let dn = norm(&dir_f);
    let mut worst = 0.0f64;
    for &t in t_samples {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("ray parameter {}", t)));
        }
        let tq = q_from_f64(t);
        let x: Vec<Q> = dir.iter().map(|d| d * &tq).collect();
        let v: Vec<f64> = field.eval_q(&x).iter().map(q_to_f64).collect();
        let vn = norm(&v);
        if vn == 0.0 {
            continue;
        }
        let par: f64 = v.iter().zip(&dir_f).map(|(a, b)| a * b).sum::<f64>() / dn;
        let perp = (vn * vn - par * par).max(0.0).sqrt();
        worst = worst.max(perp.atan2(par.abs()));
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasinLabel {
    /// Converged onto the ray of fixed point `index` of the searched list.
    Fixed {
        index: usize,
        z: Vec<f64>,
    },
    /// Converged, but onto no listed ray.
    Unmatched {
        ray: Vec<f64>,
    },
    Divergent,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasinEntry {
    pub start: Vec<f64>,
    pub label: BasinLabel,
    pub einstein_residual: f64,
}

/// Points `(z_1, .., z_(q-1))` of the slice `x_1 = 1`, spaced geometrically
/// with `n` values per axis in `[lower, upper]`.
pub fn slice_grid(q: usize, lower: f64, upper: f64, n: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = if n == 1 {
        vec![lower]
    } else {
        (0..n)
            .map(|i| (lower.ln() + (upper.ln() - lower.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect()
    };
    let dim = q - 1;
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        out.push(idx.iter().map(|&i| axis[i]).collect());
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
    }
}

const BASIN_RTOL: f64 = 1e-9;
const BASIN_MATCH: f64 = 1e-5;

/// Integrate from `(1, z)` for each start and label the run by where it ends.
/// Output order follows `starts`.
pub fn basin_scan(spec: &SpaceSpec, starts: &[Vec<f64>], t_end: f64) -> Result<Vec<BasinEntry>> {
    let fps = find_fixed_points(spec, &SearchOptions::default())?;
    basin_scan_with(spec, starts, t_end, &fps)
}

/// As [`basin_scan`] with a precomputed fixed-point list.
pub fn basin_scan_with(
    spec: &SpaceSpec,
    starts: &[Vec<f64>],
    t_end: f64,
    fps: &[FixedPointRecord],
) -> Result<Vec<BasinEntry>> {
    let q = spec.q();
    for s in starts {
        if s.len() + 1 != q {
            return Err(Error::DimensionMismatch {
                expected: q - 1,
                got: s.len(),
            });
        }
    }
    starts
        .par_iter()
        .map(|z| {
            let mut x = vec![1.0];
            x.extend_from_slice(z);
            let run = integrate_flow(spec, &Metric::new(x)?, t_end, BASIN_RTOL, BASIN_RTOL);
            let (label, res) = match run {
                Err(Error::StepFailure(_)) => (BasinLabel::Divergent, f64::NAN),
                Err(e) => return Err(e),
                Ok(tr) => {
                    let res = *tr.einstein_residual.last().expect("nonempty");
                    let label = match tr.outcome {
                        Outcome::Degenerate => BasinLabel::Degenerate,
                        Outcome::Completed => BasinLabel::Divergent,
                        Outcome::Converged => {
                            let ray = tr.terminal.clone().expect("converged run has a terminal ray");
                            nearest(fps, &ray[1..])
                                .map(|(index, z)| BasinLabel::Fixed { index, z })
                                .unwrap_or(BasinLabel::Unmatched { ray })
                        }
                    };
                    (label, res)
                }
            };
            Ok(BasinEntry {
                start: z.clone(),
                label,
                einstein_residual: res,
            })
        })
        .collect()
}

fn nearest(fps: &[FixedPointRecord], z: &[f64]) -> Option<(usize, Vec<f64>)> {
    fps.iter()
        .enumerate()
        .map(|(i, f)| {
            let d =
                f.z.iter()
                    .zip(z)
                    .map(|(a, b)| (a - b).abs() / a.abs())
                    .fold(0.0, f64::max);
            (d, i)
        })
        .filter(|(d, _)| *d <= BASIN_MATCH)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, i)| (i, fps[i].z.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_rounds() {
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(2.0), "2");
        assert_eq!(sig9(-1234567891.0), "-1234567890");
        assert_eq!(sig9(1.1102230246251565e-16), "1.11022302e-16");
        assert_eq!(sig9(0.0), "0");
    }

    #[test]
    fn tolerance_range() {
        let spec = SpaceSpec::gws(7);
        let x0 = Metric::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            integrate_flow(&spec, &x0, 1.0, 1e-2, 1e-9),
            Err(Error::InvalidTolerance(_))
        ));
        assert!(matches!(
            integrate_flow(&spec, &x0, 1.0, 1e-9, 1e-13),
            Err(Error::InvalidTolerance(_))
        ));
    }

    #[test]
    fn slice_grid_shape() {
        let g = slice_grid(3, 0.5, 2.0, 4);
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], vec![0.5, 0.5]);
        assert!((g[15][1] - 2.0).abs() < 1e-15);
    }
}
