//! Reproduction claims: published root lists, counts, certificates and the
//! numerical invariants, each evaluated against a fixed tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::curvature::{ricci_general, ricci_specialized, Metric};
use crate::error::Result;
use crate::flowfield::printed_constant;
use crate::integrate::{integrate_flow, Outcome};
use crate::rootfind::certificates::{certificate_check, default_grid, Claim, SignCertificate};
use crate::rootfind::known::{exceptional_wallach, STIEFEL_LISTED};
use crate::rootfind::{
    find_fixed_points, jensen_metrics, known_fixed_points, match_against, reduced_residual, CertificateName,
    SearchOptions,
};
use crate::spaces::{catalog_lookup, FlagId, SpaceSpec};

/// Claim groups accepted by [`run_claims`].
pub const CLAIM_GROUPS: [&str; 11] = [
    "table3",
    "gws3",
    "v2",
    "stiefel",
    "flags",
    "counts",
    "certificates",
    "jensen",
    "transcription",
    "conservation",
    "curvature",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub group: String,
    pub expected: Value,
    pub computed: Value,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportBundle {
    pub tool: String,
    pub version: String,
    pub requested: Vec<String>,
    pub claims: Vec<ClaimResult>,
    pub pass: bool,
}

/// Stiefel block parameters `(k2, k3)` for the claim id `v<k>r<n>`.
pub fn stiefel_claim_id(k2: u32, k3: u32) -> String {
    format!("v{}r{}", k2 + 1, k2 + k3 + 1)
}

fn result(id: String, group: &str, expected: Value, computed: Value) -> ClaimResult {
    ClaimResult {
        id,
        group: group.to_string(),
        expected,
        computed,
        abs_error: None,
        rel_error: None,
        tolerance: None,
        pass: false,
    }
}

fn zs(spec: &SpaceSpec) -> Result<Vec<Vec<f64>>> {
    Ok(find_fixed_points(spec, &SearchOptions::default())?
        .into_iter()
        .map(|f| f.z)
        .collect())
}

/// Exact-count list comparison at relative tolerance `tol`.
fn list_claim(id: String, group: &str, spec: &SpaceSpec, listed: &[Vec<f64>], tol: f64) -> Result<ClaimResult> {
    let found = zs(spec)?;
    let m = match_against(spec, &found, listed);
    let mut r = result(id, group, json!(listed), json!(found));
    r.rel_error = Some(m.max_mismatch);
    r.tolerance = Some(tol);
    r.pass = found.len() == listed.len() && m.exact_within(tol);
    Ok(r)
}

fn wallach_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    for id in [6u8, 7, 8, 9, 11, 12, 13, 14, 15] {
        let listed: Vec<Vec<f64>> = exceptional_wallach(id)
            .unwrap_or_default()
            .iter()
            .map(|m| vec![m[1], m[2]])
            .collect();
        out.push(list_claim(
            format!("table3/gws{}", id),
            "table3",
            &SpaceSpec::gws(id),
            &listed,
            1e-4,
        )?);
    }
    Ok(())
}

fn gws3_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    for (k, l, m) in [(1, 2, 3), (2, 5, 7)] {
        let spec = SpaceSpec::gws_klm(3, k, l, m);
        let listed = known_fixed_points(&spec).unwrap_or_default();
        out.push(list_claim(
            format!("gws3/k{}l{}m{}", k, l, m),
            "gws3",
            &spec,
            &listed,
            1e-4,
        )?);
    }
    Ok(())
}

fn v2_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    for n in 4..=20u32 {
        let t = (n as f64 - 1.0) / (2.0 * (n as f64 - 2.0));
        let found = zs(&SpaceSpec::v2(n))?;
        let err = found
            .iter()
            .flat_map(|z| z.iter().map(|v| (v - t).abs()))
            .fold(0.0, f64::max);
        let mut r = result(format!("v2/n{}", n), "v2", json!([[t, t]]), json!(found));
        r.abs_error = Some(err);
        r.tolerance = Some(1e-10);
        r.pass = found.len() == 1 && err <= 1e-10;
        out.push(r);
    }
    Ok(())
}

fn stiefel_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    for (k2, k3) in STIEFEL_LISTED {
        let spec = SpaceSpec::stiefel(k2, k3);
        let listed = known_fixed_points(&spec).unwrap_or_default();
        out.push(list_claim(stiefel_claim_id(k2, k3), "stiefel", &spec, &listed, 1e-4)?);
    }
    Ok(())
}

fn flag_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    for id in FlagId::ALL {
        let spec = SpaceSpec::flag(id);
        let listed = known_fixed_points(&spec).unwrap_or_default();
        let mut r = list_claim(format!("flags/{}", id.tag()), "flags", &spec, &listed, 1e-4)?;
        let kahler = reduced_residual(&spec, &[2.0, 3.0, 4.0])?;
        r.abs_error = Some(kahler);
        r.pass &= kahler < 1e-10;
        out.push(r);
    }
    Ok(())
}

/// Count claims: GWS.1 with `l = m`, and the `(2,2,2)` case.
pub const COUNT_CASES: [((u32, u32), usize); 6] = [
    ((5, 3), 4),
    ((7, 5), 4),
    ((9, 7), 4),
    ((4, 5), 3),
    ((6, 10), 3),
    ((2, 2), 1),
];

fn count_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    for ((k, m), want) in COUNT_CASES {
        let found = zs(&SpaceSpec::gws_klm(1, k, m, m))?;
        let mut r = result(
            format!("counts/k{}m{}", k, m),
            "counts",
            json!(want),
            json!(found.len()),
        );
        r.pass = found.len() == want;
        out.push(r);
    }
    Ok(())
}

fn certificate_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    for name in CertificateName::ALL {
        let cert = match SignCertificate::load(name) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let mut failures = Vec::new();
        let grid = default_grid(name);
        for p in &grid {
            let rep = certificate_check(&cert, p)?;
            if !rep.holds {
                failures.push(p.clone());
            }
        }
        let symbolic = matches!(cert.claim, Claim::Alternating).then(|| cert.symbolic_alternation());
        let mut r = result(
            format!("certificates/{}", name),
            "certificates",
            json!({ "grid_points": grid.len(), "failures": 0 }),
            json!({ "grid_points": grid.len(), "failures": failures.len(), "failing": failures, "symbolic_alternation": symbolic }),
        );
        r.pass = failures.is_empty() && symbolic != Some(false);
        out.push(r);
    }
    Ok(())
}

fn jensen_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    for k2 in 2..=12u32 {
        let spec = SpaceSpec::stiefel(k2, k2);
        let pts = jensen_metrics(k2)?;
        let mut worst = 0.0f64;
        let mut zs = Vec::new();
        for p in &pts {
            let z = &p.z[..3];
            worst = worst.max(reduced_residual(&spec, z)?);
            zs.push(z.to_vec());
        }
        let mut r = result(format!("jensen/k{}", k2), "jensen", json!(0.0), json!(zs));
        r.abs_error = Some(worst);
        r.tolerance = Some(1e-10);
        r.pass = worst < 1e-10;
        out.push(r);
    }
    Ok(())
}

/// Spaces compared against the printed polynomial systems.
pub fn transcription_cases() -> Vec<SpaceSpec> {
    let mut v = vec![
        SpaceSpec::gws_klm(1, 1, 1, 1),
        SpaceSpec::gws_klm(1, 2, 3, 4),
        SpaceSpec::gws_klm(1, 5, 3, 3),
        SpaceSpec::gws_klm(1, 1, 2, 7),
        SpaceSpec::gws_klm(1, 6, 1, 2),
    ];
    v.extend([4, 5, 7, 12, 20].map(SpaceSpec::v2));
    v.extend([(2, 1), (4, 2), (6, 3)].map(|(a, b)| SpaceSpec::stiefel(a, b)));
    v.extend(FlagId::ALL.map(SpaceSpec::flag));
    v
}

fn transcription_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    for spec in transcription_cases() {
        let c = printed_constant(&spec)?;
        let mut r = result(
            format!("transcription/{}", spec),
            "transcription",
            json!("single rational constant"),
            json!(c.as_ref().map(|c| c.to_string())),
        );
        r.pass = c.is_some();
        out.push(r);
    }
    Ok(())
}

fn random_metric(rng: &mut ChaCha8Rng, q: usize) -> Vec<f64> {
    (0..q).map(|_| rng.gen_range(-1.5f64..1.5).exp()).collect()
}

fn conservation_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for spec in SpaceSpec::catalog() {
        let mut drift = 0.0f64;
        let mut res = 0.0f64;
        let mut converged = 0;
        for _ in 0..20 {
            let x0 = Metric::new(random_metric(&mut rng, spec.q()))?;
            let tr = integrate_flow(&spec, &x0, 50.0, 1e-9, 1e-9)?;
            drift = drift.max(tr.volume_drift());
            if tr.outcome == Outcome::Converged {
                converged += 1;
                res = res.max(*tr.einstein_residual.last().expect("nonempty"));
            }
        }
        let mut r = result(
            format!("conservation/{}", spec),
            "conservation",
            json!({ "volume_drift": 1e-7, "einstein_residual": 1e-6 }),
            json!({ "volume_drift": drift, "einstein_residual": res, "converged_runs": converged }),
        );
        r.abs_error = Some(drift);
        r.tolerance = Some(1e-7);
        r.pass = drift <= 1e-7 && res < 1e-6;
        out.push(r);
    }
    Ok(())
}

fn curvature_claims(out: &mut Vec<ClaimResult>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    for spec in SpaceSpec::catalog() {
        let iso = catalog_lookup(&spec)?;
        let mut agree = 0.0f64;
        let mut scale = 0.0f64;
        for _ in 0..100 {
            let x = random_metric(&mut rng, spec.q());
            let c = rng.gen_range(0.1..10.0);
            let g = Metric::new(x)?;
            let a = ricci_specialized(&spec, &g)?;
            let b = ricci_general(&iso, &g)?;
            let s = ricci_specialized(&spec, &g.scaled(c)?)?;
            let norm = b.components.iter().map(|v| v.abs()).fold(f64::MIN_POSITIVE, f64::max);
            for i in 0..spec.q() {
                agree = agree.max((a.components[i] - b.components[i]).abs() / norm);
                scale = scale.max((c * s.components[i] - a.components[i]).abs() / norm);
            }
        }
        let mut r = result(
            format!("curvature/{}", spec),
            "curvature",
            json!({ "agreement": 1e-12, "scaling": 1e-12 }),
            json!({ "agreement": agree, "scaling": scale }),
        );
        r.rel_error = Some(agree.max(scale));
        r.tolerance = Some(1e-12);
        r.pass = agree <= 1e-12 && scale <= 1e-12;
        out.push(r);
    }
    Ok(())
}

/// Evaluate the named claim groups, or every group for an empty list. A
/// Stiefel id such as `v5r7` selects that single list.
pub fn run_claims(requested: &[String]) -> Result<ReportBundle> {
    let all: Vec<String> = CLAIM_GROUPS.iter().map(|s| s.to_string()).collect();
    let names = if requested.is_empty() { &all } else { requested };
    let mut claims = Vec::new();
    for name in names {
        let mut out = Vec::new();
        match name.as_str() {
            "table3" => wallach_claims(&mut out)?,
            "gws3" => gws3_claims(&mut out)?,
            "v2" => v2_claims(&mut out)?,
            "stiefel" => stiefel_claims(&mut out)?,
            "flags" => flag_claims(&mut out)?,
            "counts" => count_claims(&mut out)?,
            "certificates" => certificate_claims(&mut out)?,
            "jensen" => jensen_claims(&mut out)?,
            "transcription" => transcription_claims(&mut out)?,
            "conservation" => conservation_claims(&mut out)?,
            "curvature" => curvature_claims(&mut out)?,
            other => {
                let (k2, k3) = STIEFEL_LISTED
                    .into_iter()
                    .find(|(a, b)| stiefel_claim_id(*a, *b) == other)
                    .ok_or_else(|| crate::Error::UnknownSpace(format!("unknown claim {}", other)))?;
                let spec = SpaceSpec::stiefel(k2, k3);
                let listed = known_fixed_points(&spec).unwrap_or_default();
                out.push(list_claim(other.to_string(), "stiefel", &spec, &listed, 1e-4)?);
            }
        }
        claims.extend(out);
    }
    let pass = claims.iter().all(|c| c.pass);
    Ok(ReportBundle {
        tool: "ricci".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        requested: names.to_vec(),
        claims,
        pass,
    })
}

/// Whether `id` names a claim group or a single Stiefel list.
pub fn is_claim_id(id: &str) -> bool {
    CLAIM_GROUPS.contains(&id) || STIEFEL_LISTED.iter().any(|(a, b)| stiefel_claim_id(*a, *b) == id)
}
