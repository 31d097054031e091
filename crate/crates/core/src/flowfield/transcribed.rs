//! Printed polynomial systems, stored as plain-text blocks:
//!
//! ```text
//! system <name>
//! vars <v1> <v2> ..
//! params <p1> <p2> ..
//! <one component per line>
//! end
//! ```

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::poly::{qi, Parser, PolyVectorField, Q};
use crate::spaces::{catalog_lookup, FlagId, GwsParams, SpaceSpec};

const SOURCE: &str = include_str!("../../data/systems.txt");

#[derive(Clone, Debug)]
pub struct Block {
    pub name: String,
    pub vars: Vec<String>,
    pub params: Vec<String>,
    pub lines: Vec<String>,
}

fn parse_blocks(src: &str) -> Vec<Block> {
    let mut out = Vec::new();
    let mut cur: Option<Block> = None;
    for line in src.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix("system ") {
            cur = Some(Block {
                name: name.trim().to_string(),
                vars: Vec::new(),
                params: Vec::new(),
                lines: Vec::new(),
            });
        } else if line == "end" {
            out.extend(cur.take());
        } else if let Some(b) = cur.as_mut() {
            if let Some(v) = line.strip_prefix("vars") {
                b.vars = v.split_whitespace().map(str::to_string).collect();
            } else if let Some(p) = line.strip_prefix("params") {
                b.params = p.split_whitespace().map(str::to_string).collect();
            } else {
                b.lines.push(line.to_string());
            }
        }
    }
    out
}

pub fn blocks() -> &'static [Block] {
    static BLOCKS: OnceLock<Vec<Block>> = OnceLock::new();
    BLOCKS.get_or_init(|| parse_blocks(SOURCE))
}

pub fn block(name: &str) -> Option<&'static Block> {
    blocks().iter().find(|b| b.name == name)
}

/// Parse block `name` with every listed parameter bound.
pub fn instantiate(name: &str, params: &[(&str, Q)]) -> Result<PolyVectorField> {
    let b = block(name).ok_or_else(|| Error::NotTranscribed(name.to_string()))?;
    for p in &b.params {
        if !params.iter().any(|(k, _)| k == p) {
            return Err(Error::ParameterOutOfRange(format!("{}: missing parameter {}", name, p)));
        }
    }
    let parser = Parser::new(&b.vars).params(params.iter().map(|(k, v)| (*k, v.clone())));
    let comps = b.lines.iter().map(|l| parser.parse(l)).collect::<Result<Vec<_>>>()?;
    Ok(PolyVectorField::new(comps))
}

fn flag_params(id: FlagId) -> Vec<(&'static str, Q)> {
    let iso = catalog_lookup(&SpaceSpec::flag(id)).expect("flag data");
    let mut p: Vec<(&str, Q)> = ["d1", "d2", "d3", "d4"]
        .into_iter()
        .zip(iso.dims.iter().map(|&d| qi(d as i64)))
        .collect();
    p.push(("A112", iso.a(0, 0, 1)));
    p.push(("A123", iso.a(0, 1, 2)));
    p.push(("A134", iso.a(0, 2, 3)));
    p.push(("A224", iso.a(1, 1, 3)));
    p
}

fn gws_params(spec: &SpaceSpec) -> Result<Vec<(&'static str, Q)>> {
    let iso = catalog_lookup(spec)?;
    let a = iso.wallach_a.clone().expect("Wallach constants");
    let [a1, a2, a3] = a;
    Ok(vec![
        ("a1", a1),
        ("a2", a2),
        ("a3", a3),
        ("d1", qi(iso.dims[0] as i64)),
        ("d2", qi(iso.dims[1] as i64)),
        ("d3", qi(iso.dims[2] as i64)),
    ])
}

fn family_block(spec: &SpaceSpec, suffix: &str) -> Result<PolyVectorField> {
    spec.validate()?;
    match *spec {
        SpaceSpec::Gws { .. } => instantiate(&format!("gws{}", suffix), &gws_params(spec)?),
        SpaceSpec::StiefelV2 { n } => instantiate(&format!("v2{}", suffix), &[("n", qi(n as i64))]),
        SpaceSpec::StiefelBlock { k2, k3, .. } => instantiate(
            &format!("stiefel{}", suffix),
            &[("k2", qi(k2 as i64)), ("k3", qi(k3 as i64))],
        ),
        SpaceSpec::Flag4(id) => instantiate(&format!("flag{}", suffix), &flag_params(id)),
    }
}

/// The printed x-space system with parameters substituted. Stiefel block
/// systems use the coordinate order `(x_2, x_12, x_13, x_23)`.
pub fn transcribed_system(spec: &SpaceSpec) -> Result<PolyVectorField> {
    family_block(spec, "")
}

/// The printed system in the chart `U_1`. The Stiefel block display orders
/// its chart coordinates as `(x_12, x_23, x_13, 1) / x_2`.
pub fn printed_chart_system(spec: &SpaceSpec) -> Result<PolyVectorField> {
    family_block(spec, ".u1")
}

/// The printed system at infinity in the chart `U_1`, when one is displayed.
pub fn printed_infinity_system(spec: &SpaceSpec) -> Result<PolyVectorField> {
    spec.validate()?;
    let not = || Error::NotTranscribed(spec.to_string());
    match *spec {
        SpaceSpec::Gws { id, params } => match params {
            GwsParams::Klm { k, l, m, .. } => {
                let p = [("k", qi(k as i64)), ("l", qi(l as i64)), ("m", qi(m as i64))];
                instantiate(&format!("inf.gws{}", id), &p)
            }
            GwsParams::L { l } => instantiate(&format!("inf.gws{}", id), &[("l", qi(l as i64))]),
            GwsParams::Fixed => instantiate(&format!("inf.gws{}", id), &[]),
        },
        SpaceSpec::StiefelBlock { k2, k3, .. } if k2 == k3 => instantiate("inf.stiefel_k2", &[("k2", qi(k2 as i64))]),
        SpaceSpec::Flag4(id) => instantiate(&format!("inf.flag.{}", id.tag()), &[]),
        _ => Err(not()),
    }
}

/// The printed infinity system of `SO(k+2m)/SO(k)xSO(m)xSO(m)`.
pub fn printed_infinity_system_equal_lm(k: u32, m: u32) -> Result<PolyVectorField> {
    instantiate("inf.gws1lm", &[("k", qi(k as i64)), ("m", qi(m as i64))])
}
