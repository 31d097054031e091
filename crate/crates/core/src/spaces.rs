//! Catalog of the supported homogeneous spaces and their structure constants.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{q, qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FlagId {
    F4,
    E7,
    E8a3,
    E8a6,
}

impl FlagId {
    pub const ALL: [FlagId; 4] = [FlagId::F4, FlagId::E7, FlagId::E8a3, FlagId::E8a6];

    pub fn tag(self) -> &'static str {
        match self {
            FlagId::F4 => "f4",
            FlagId::E7 => "e7",
            FlagId::E8a3 => "e8a3",
            FlagId::E8a6 => "e8a6",
        }
    }

    /// Group data for display: G/K.
    pub fn description(self) -> &'static str {
        match self {
            FlagId::F4 => "F4/SU(3)xSU(2)xU(1)",
            FlagId::E7 => "E7/SU(5)xSU(3)xU(1)",
            FlagId::E8a3 => "E8/SO(10)xSU(3)xU(1)",
            FlagId::E8a6 => "E8/SU(7)xSU(2)xU(1)",
        }
    }
}

/// Parameters of a generalized Wallach space family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GwsParams {
    /// Families 1-3; `n = k + l + m` is kept alongside.
    Klm { k: u32, l: u32, m: u32, n: u32 },
    /// Families 4 and 5.
    L { l: u32 },
    /// Families 6-15.
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceSpec {
    Gws {
        id: u8,
        params: GwsParams,
    },
    StiefelV2 {
        n: u32,
    },
    /// `V_{1+k2} R^n` with `n = 1 + k2 + k3`; summand order (x2, x12, x13, x23).
    StiefelBlock {
        k2: u32,
        k3: u32,
        n: u32,
    },
    Flag4(FlagId),
}

impl SpaceSpec {
    pub fn gws_klm(id: u8, k: u32, l: u32, m: u32) -> Self {
        SpaceSpec::Gws {
            id,
            params: GwsParams::Klm { k, l, m, n: k + l + m },
        }
    }

    pub fn gws_l(id: u8, l: u32) -> Self {
        SpaceSpec::Gws {
            id,
            params: GwsParams::L { l },
        }
    }

    pub fn gws(id: u8) -> Self {
        SpaceSpec::Gws {
            id,
            params: GwsParams::Fixed,
        }
    }

    pub fn v2(n: u32) -> Self {
        SpaceSpec::StiefelV2 { n }
    }

    pub fn stiefel(k2: u32, k3: u32) -> Self {
        SpaceSpec::StiefelBlock { k2, k3, n: 1 + k2 + k3 }
    }

    pub fn flag(id: FlagId) -> Self {
        SpaceSpec::Flag4(id)
    }

    /// Number of isotropy summands.
    pub fn q(&self) -> usize {
        match self {
            SpaceSpec::Gws { .. } | SpaceSpec::StiefelV2 { .. } => 3,
            SpaceSpec::StiefelBlock { .. } | SpaceSpec::Flag4(_) => 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::ParameterOutOfRange(s));
        match *self {
            SpaceSpec::Gws { id, params } => match (id, params) {
                (1..=3, GwsParams::Klm { k, l, m, n }) => {
                    if k < 1 || l < 1 || m < 1 {
                        return bad(format!("gws{}: k, l, m must be >= 1", id));
                    }
                    if n != k + l + m {
                        return bad(format!("gws{}: n = {} but k+l+m = {}", id, n, k + l + m));
                    }
                    Ok(())
                }
                (4, GwsParams::L { l }) if l >= 2 => Ok(()),
                (4, GwsParams::L { .. }) => bad("gws4: l >= 2 required".into()),
                (5, GwsParams::L { l }) if l >= 4 => Ok(()),
                (5, GwsParams::L { .. }) => bad("gws5: l >= 4 required".into()),
                (6..=15, GwsParams::Fixed) => Ok(()),
                (1..=15, _) => bad(format!("gws{}: wrong parameter set", id)),
                _ => Err(Error::UnknownSpace(format!("gws{}", id))),
            },
            SpaceSpec::StiefelV2 { n } if n >= 4 => Ok(()),
            SpaceSpec::StiefelV2 { .. } => bad("v2: n >= 4 required".into()),
            SpaceSpec::StiefelBlock { k2, k3, n } => {
                if k2 < 2 || k3 < 1 {
                    return bad("stiefel: k2 >= 2 and k3 >= 1 required".into());
                }
                if n != 1 + k2 + k3 {
                    return bad(format!("stiefel: n = {} but 1+k2+k3 = {}", n, 1 + k2 + k3));
                }
                Ok(())
            }
            SpaceSpec::Flag4(_) => Ok(()),
        }
    }

    /// Every supported family with representative parameters, in listing order.
    pub fn catalog() -> Vec<SpaceSpec> {
        let mut v = vec![
            SpaceSpec::gws_klm(1, 2, 2, 2),
            SpaceSpec::gws_klm(2, 1, 1, 1),
            SpaceSpec::gws_klm(3, 1, 1, 1),
            SpaceSpec::gws_l(4, 2),
            SpaceSpec::gws_l(5, 4),
        ];
        v.extend((6..=15).map(SpaceSpec::gws));
        v.push(SpaceSpec::v2(4));
        v.push(SpaceSpec::stiefel(2, 1));
        v.extend(FlagId::ALL.iter().map(|&f| SpaceSpec::flag(f)));
        v
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Gws { id, params } => match params {
                GwsParams::Klm { k, l, m, .. } => write!(f, "gws{}:k={},l={},m={}", id, k, l, m),
                GwsParams::L { l } => write!(f, "gws{}:l={}", id, l),
                GwsParams::Fixed => write!(f, "gws{}", id),
            },
            SpaceSpec::StiefelV2 { n } => write!(f, "v2:n={}", n),
            SpaceSpec::StiefelBlock { k2, k3, .. } => write!(f, "stiefel:k2={},k3={}", k2, k3),
            SpaceSpec::Flag4(id) => write!(f, "flag:{}", id.tag()),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    /// Canonical text forms: `gws1:k=2,l=2,m=2`, `gws4:l=3`, `gws7`, `v2:n=5`,
    /// `stiefel:k2=4,k3=2`, `flag:f4`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownSpace(s.chars().take(64).collect());
        let s = s.trim();
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let head = head.to_ascii_lowercase();
        if head == "flag" {
            let id = match tail.map(|t| t.trim().to_ascii_lowercase()).as_deref() {
                Some("f4") => FlagId::F4,
                Some("e7") => FlagId::E7,
                Some("e8a3") => FlagId::E8a3,
                Some("e8a6") => FlagId::E8a6,
                _ => return Err(unknown()),
            };
            return Ok(SpaceSpec::Flag4(id));
        }
        let kv = parse_kv(tail)?;
        let get = |name: &str| -> Result<u32> {
            kv.get(name)
                .copied()
                .ok_or_else(|| Error::ParameterOutOfRange(format!("{}: missing parameter {}", head, name)))
        };
        let allow = |names: &[&str]| -> Result<()> {
            match kv.keys().find(|k| !names.contains(&k.as_str())) {
                Some(k) => Err(Error::ParameterOutOfRange(format!(
                    "{}: unexpected parameter {}",
                    head, k
                ))),
                None => Ok(()),
            }
        };
        let spec = if let Some(id) = head.strip_prefix("gws") {
            let id: u8 = id.parse().map_err(|_| unknown())?;
            match id {
                1..=3 => {
                    allow(&["k", "l", "m", "n"])?;
                    let (k, l, m) = (get("k")?, get("l")?, get("m")?);
                    let n = match kv.get("n") {
                        Some(&n) => n,
                        None => k
                            .checked_add(l)
                            .and_then(|v| v.checked_add(m))
                            .ok_or_else(|| Error::ParameterOutOfRange("parameters too large".into()))?,
                    };
                    SpaceSpec::Gws {
                        id,
                        params: GwsParams::Klm { k, l, m, n },
                    }
                }
                4 | 5 => {
                    allow(&["l"])?;
                    SpaceSpec::gws_l(id, get("l")?)
                }
                6..=15 => {
                    allow(&[])?;
                    SpaceSpec::gws(id)
                }
                _ => return Err(unknown()),
            }
        } else if head == "v2" {
            allow(&["n"])?;
            SpaceSpec::v2(get("n")?)
        } else if head == "stiefel" {
            allow(&["k2", "k3", "n"])?;
            let (k2, k3) = (get("k2")?, get("k3")?);
            let n = match kv.get("n") {
                Some(&n) => n,
                None => k2
                    .checked_add(k3)
                    .and_then(|v| v.checked_add(1))
                    .ok_or_else(|| Error::ParameterOutOfRange("parameters too large".into()))?,
            };
            SpaceSpec::StiefelBlock { k2, k3, n }
        } else {
            return Err(unknown());
        };
        spec.validate()?;
        Ok(spec)
    }
}

const MAX_PARAM: u32 = 1_000_000;

fn parse_kv(tail: Option<&str>) -> Result<BTreeMap<String, u32>> {
    let mut out = BTreeMap::new();
    let tail = match tail {
        Some(t) if !t.trim().is_empty() => t,
        _ => return Ok(out),
    };
    for part in tail.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::ParameterOutOfRange(format!("expected key=value, got {:?}", part)))?;
        let k = k.trim().to_ascii_lowercase();
        let v: u32 = v
            .trim()
            .parse()
            .map_err(|_| Error::ParameterOutOfRange(format!("{}: not a non-negative integer", k)))?;
        if v > MAX_PARAM {
            return Err(Error::ParameterOutOfRange(format!(
                "{} = {} exceeds {}",
                k, v, MAX_PARAM
            )));
        }
        if out.insert(k.clone(), v).is_some() {
            return Err(Error::ParameterOutOfRange(format!("{} given twice", k)));
        }
    }
    Ok(out)
}

/// Summand dimensions and structure constants of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropyData {
    pub q: usize,
    pub dims: Vec<u64>,
    triples: BTreeMap<(usize, usize, usize), Q>,
    pub wallach_a: Option<[Q; 3]>,
}

fn sorted3(i: usize, j: usize, k: usize) -> (usize, usize, usize) {
    let mut v = [i, j, k];
    v.sort_unstable();
    (v[0], v[1], v[2])
}

impl IsotropyData {
    pub fn new(dims: Vec<u64>, triples: &[((usize, usize, usize), Q)]) -> Self {
        let mut map = BTreeMap::new();
        for ((i, j, k), v) in triples {
            if !v.is_zero() {
                map.insert(sorted3(*i, *j, *k), v.clone());
            }
        }
        IsotropyData {
            q: dims.len(),
            dims,
            triples: map,
            wallach_a: None,
        }
    }

    /// `A_ijk`, symmetric in all indices (0-based).
    pub fn a(&self, i: usize, j: usize, k: usize) -> Q {
        self.triples.get(&sorted3(i, j, k)).cloned().unwrap_or_else(Q::zero)
    }

    /// Nonzero triples with sorted indices.
    pub fn triples(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Q)> {
        self.triples.iter()
    }

    /// Manifold dimension `n = sum d_i`.
    pub fn n_dim(&self) -> u64 {
        self.dims.iter().sum()
    }

    pub fn dims_q(&self) -> Vec<Q> {
        self.dims.iter().map(|&d| qi(d as i64)).collect()
    }
}

/// Flag manifold dims and (A_224, A_112, A_123, A_134).
fn flag_table(id: FlagId) -> ([u64; 4], [Q; 4]) {
    match id {
        FlagId::F4 => ([12, 18, 4, 6], [qi(2), qi(2), qi(1), q(2, 3)]),
        FlagId::E7 => ([48, 36, 16, 6], [qi(2), qi(8), qi(4), q(4, 3)]),
        FlagId::E8a3 => ([96, 60, 32, 6], [qi(2), qi(16), qi(8), q(8, 5)]),
        FlagId::E8a6 => ([84, 70, 28, 14], [q(14, 3), qi(14), qi(7), q(14, 5)]),
    }
}

/// Dimensions and constants `a_i` of a Wallach family.
fn gws_table(id: u8, params: GwsParams) -> Result<([u64; 3], [Q; 3])> {
    let same = |d: u64, a: Q| ([d; 3], [a.clone(), a.clone(), a]);
    let out = match (id, params) {
        (1..=3, GwsParams::Klm { k, l, m, n }) => {
            let (k, l, m, n) = (k as u64, l as u64, m as u64, n as i64);
            let scale = [1, 2, 4][id as usize - 1];
            let den = match id {
                1 => 2 * (n - 2),
                2 => 2 * n,
                _ => 2 * (n + 1),
            };
            (
                [scale * k * l, scale * k * m, scale * l * m],
                [q(m as i64, den), q(l as i64, den), q(k as i64, den)],
            )
        }
        (4, GwsParams::L { l }) => {
            let l = l as i64;
            (
                [(l * (l - 1)) as u64, (l * (l + 1)) as u64, (l * l - 1) as u64],
                [q(l + 1, 4 * l), q(l - 1, 4 * l), q(1, 4)],
            )
        }
        (5, GwsParams::L { l }) => {
            let l = l as i64;
            (
                [(2 * (l - 1)) as u64, (2 * (l - 1)) as u64, ((l - 1) * (l - 2)) as u64],
                [q(l - 2, 4 * (l - 1)), q(l - 2, 4 * (l - 1)), q(1, 2 * (l - 1))],
            )
        }
        (6, _) => ([16, 16, 24], [q(1, 4), q(1, 4), q(1, 6)]),
        (7, _) => same(16, q(1, 6)),
        (8, _) => ([14, 28, 12], [q(1, 4), q(1, 8), q(7, 24)]),
        (9, _) => same(32, q(2, 9)),
        (10, _) => ([30, 40, 24], [q(2, 9), q(1, 6), q(5, 18)]),
        (11, _) => same(35, q(5, 18)),
        (12, _) => ([64, 64, 48], [q(1, 5), q(1, 5), q(4, 15)]),
        (13, _) => same(64, q(4, 15)),
        (14, _) => ([8, 8, 20], [q(5, 18), q(5, 18), q(1, 9)]),
        (15, _) => same(8, q(1, 9)),
        _ => return Err(Error::UnknownSpace(format!("gws{}", id))),
    };
    Ok(out)
}

/// Structure constants of a valid space.
pub fn catalog_lookup(spec: &SpaceSpec) -> Result<IsotropyData> {
    spec.validate()?;
    match *spec {
        SpaceSpec::Gws { id, params } => {
            let (dims, a) = gws_table(id, params)?;
            let a123 = &a[0] * qi(dims[0] as i64);
            for i in 1..3 {
                assert_eq!(
                    &a[i] * qi(dims[i] as i64),
                    a123,
                    "inconsistent Wallach constants for {}",
                    spec
                );
            }
            debug_assert!(a.iter().all(|v| v.is_positive() && *v <= q(1, 2)));
            let mut iso = IsotropyData::new(dims.to_vec(), &[((0, 1, 2), a123)]);
            iso.wallach_a = Some(a);
            Ok(iso)
        }
        SpaceSpec::StiefelV2 { n } => {
            let n = n as u64;
            Ok(IsotropyData::new(vec![1, n - 2, n - 2], &[((0, 1, 2), q(1, 2))]))
        }
        SpaceSpec::StiefelBlock { k2, k3, n } => {
            let (k2, k3, n) = (k2 as i64, k3 as i64, n as i64);
            let den = 2 * (n - 2);
            let dims = vec![(k2 * (k2 - 1) / 2) as u64, k2 as u64, k3 as u64, (k2 * k3) as u64];
            Ok(IsotropyData::new(
                dims,
                &[
                    ((0, 0, 0), q(k2 * (k2 - 1) * (k2 - 2), den)),
                    ((0, 1, 1), q(k2 * (k2 - 1), den)),
                    ((0, 3, 3), q(k2 * k3 * (k2 - 1), den)),
                    ((1, 2, 3), q(k2 * k3, den)),
                ],
            ))
        }
        SpaceSpec::Flag4(id) => {
            let (dims, [a224, a112, a123, a134]) = flag_table(id);
            Ok(IsotropyData::new(
                dims.to_vec(),
                &[
                    ((1, 1, 3), a224),
                    ((0, 0, 1), a112),
                    ((0, 1, 2), a123),
                    ((0, 2, 3), a134),
                ],
            ))
        }
    }
}

/// One family in the printed catalog listing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogRow {
    pub name: String,
    pub space: String,
    pub q: usize,
    /// Summand dimensions, as numbers or as formulas in the family parameters.
    pub dims: Vec<String>,
    /// `(label, value)` pairs: `a_i` for Wallach spaces, nonzero `A_ijk` otherwise.
    pub constants: Vec<(String, String)>,
    /// Canonical text of a representative member.
    pub example: String,
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn labelled(labels: &[&str], values: Vec<String>) -> Vec<(String, String)> {
    labels.iter().map(|l| l.to_string()).zip(values).collect()
}

/// The 15 Wallach families, the two Stiefel families and the four flag manifolds.
pub fn catalog_listing() -> Vec<CatalogRow> {
    let a_labels = ["a1", "a2", "a3"];
    let mut rows = Vec::new();
    let klm = |scale: &str, den: &str| {
        let d = |a: &str| {
            if scale == "1" {
                a.to_string()
            } else {
                format!("{}{}", scale, a)
            }
        };
        (
            vec![d("kl"), d("km"), d("lm")],
            strings(&[&format!("m/{}", den), &format!("l/{}", den), &format!("k/{}", den)]),
        )
    };
    for id in 1..=15u8 {
        let example = match id {
            1..=3 => SpaceSpec::gws_klm(id, 1, 2, 3),
            4 => SpaceSpec::gws_l(4, 3),
            5 => SpaceSpec::gws_l(5, 4),
            _ => SpaceSpec::gws(id),
        };
        let (dims, consts) = match id {
            1 => klm("1", "(2(n-2))"),
            2 => klm("2", "(2n)"),
            3 => klm("4", "(2(n+1))"),
            4 => (
                strings(&["l(l-1)", "l(l+1)", "l^2-1"]),
                strings(&["(l+1)/(4l)", "(l-1)/(4l)", "1/4"]),
            ),
            5 => (
                strings(&["2(l-1)", "2(l-1)", "(l-1)(l-2)"]),
                strings(&["(l-2)/(4(l-1))", "(l-2)/(4(l-1))", "1/(2(l-1))"]),
            ),
            _ => {
                let (d, a) = gws_table(id, GwsParams::Fixed).expect("fixed family");
                (
                    d.iter().map(|v| v.to_string()).collect(),
                    a.iter().map(|v| v.to_string()).collect(),
                )
            }
        };
        let space = describe(&example).split(" [").next().unwrap_or_default().to_string();
        rows.push(CatalogRow {
            name: format!("gws{}", id),
            space,
            q: 3,
            dims,
            constants: labelled(&a_labels, consts),
            example: example.to_string(),
        });
    }
    rows.push(CatalogRow {
        name: "v2".into(),
        space: "SO(n)/SO(n-2)".into(),
        q: 3,
        dims: strings(&["1", "n-2", "n-2"]),
        constants: labelled(&["A123"], strings(&["1/2"])),
        example: SpaceSpec::v2(5).to_string(),
    });
    rows.push(CatalogRow {
        name: "stiefel".into(),
        space: "SO(n)/SO(k3), n = 1+k2+k3".into(),
        q: 4,
        dims: strings(&["k2(k2-1)/2", "k2", "k3", "k2k3"]),
        constants: labelled(
            &["A111", "A122", "A144", "A234"],
            strings(&[
                "k2(k2-1)(k2-2)/(2(n-2))",
                "k2(k2-1)/(2(n-2))",
                "k2k3(k2-1)/(2(n-2))",
                "k2k3/(2(n-2))",
            ]),
        ),
        example: SpaceSpec::stiefel(4, 2).to_string(),
    });
    for id in FlagId::ALL {
        let (d, a) = flag_table(id);
        rows.push(CatalogRow {
            name: format!("flag:{}", id.tag()),
            space: id.description().into(),
            q: 4,
            dims: d.iter().map(|v| v.to_string()).collect(),
            constants: labelled(
                &["A224", "A112", "A123", "A134"],
                a.iter().map(|v| v.to_string()).collect(),
            ),
            example: SpaceSpec::flag(id).to_string(),
        });
    }
    rows
}

/// Human-readable name of the underlying homogeneous space.
pub fn describe(spec: &SpaceSpec) -> String {
    match *spec {
        SpaceSpec::Gws { id, params } => {
            let base = match id {
                1 => "SO(k+l+m)/SO(k)xSO(l)xSO(m)",
                2 => "SU(k+l+m)/S(U(k)xU(l)xU(m))",
                3 => "Sp(k+l+m)/Sp(k)xSp(l)xSp(m)",
                4 => "SU(2l)/U(l)",
                5 => "SO(2l)/U(1)xU(l-1)",
                6 => "E6/SU(4)xSp(1)xSp(1)xU(1)",
                7 => "E6/SO(8)xU(1)xU(1)",
                8 => "E6/Sp(3)xSp(1)",
                9 => "E7/SO(8)xSp(1)xSp(1)xSp(1)",
                10 => "E7/SU(6)xSp(1)xU(1)",
                11 => "E7/SO(8)",
                12 => "E8/SO(12)xSp(1)xSp(1)",
                13 => "E8/SO(8)xSO(8)",
                14 => "F4/SO(5)xSp(1)xSp(1)",
                15 => "F4/SO(8)",
                _ => "?",
            };
            match params {
                GwsParams::Fixed => base.to_string(),
                _ => format!("{} [{}]", base, spec),
            }
        }
        SpaceSpec::StiefelV2 { n } => format!("SO({})/SO({})", n, n - 2),
        SpaceSpec::StiefelBlock { k2, k3, n } => {
            format!("V_{}R^{} = SO({})/SO({}) [k2={}, k3={}]", 1 + k2, n, n, k3, k2, k3)
        }
        SpaceSpec::Flag4(id) => id.description().to_string(),
    }
}

/// `true` when all stored triples are invariant under index permutations
/// (always the case by construction; exposed for tests).
pub fn triples_symmetric(iso: &IsotropyData) -> bool {
    let q = iso.q;
    for i in 0..q {
        for j in 0..q {
            for k in 0..q {
                let v = iso.a(i, j, k);
                if v != iso.a(j, i, k) || v != iso.a(k, j, i) || v != iso.a(i, k, j) {
                    return false;
                }
            }
        }
    }
    true
}
