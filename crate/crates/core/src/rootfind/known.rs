//! Published fixed points at infinity, in `U_1` coordinates `(x_2, .., x_q) / x_1`.
//!
//! Stiefel block entries are stored in the printed coordinate order
//! `(x_12, x_23, x_13) / x_2` and converted on access.

use crate::spaces::{FlagId, GwsParams, SpaceSpec};

/// Table of Einstein metrics `(1, y_2, y_3)` for the parameterless Wallach spaces.
pub fn exceptional_wallach(id: u8) -> Option<Vec<[f64; 3]>> {
    let v: &[[f64; 3]] = match id {
        6 => &[[1.0, 0.6, 0.8], [1.0, 1.66667, 1.33333]],
        7 => &[[1.0, 1.0, 1.0], [1.0, 0.5, 0.5], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]],
        8 => &[[1.0, 1.4618, 1.88845], [1.0, 0.8640, 0.4838]],
        9 => &[[1.0, 1.0, 1.0], [1.0, 1.25, 1.0], [1.0, 0.8, 0.8], [1.0, 1.0, 1.25]],
        11 => &[[1.0, 1.0, 1.0], [1.0, 1.0, 0.8], [1.0, 1.25, 1.25], [1.0, 0.8, 1.0]],
        12 => &[[1.0, 1.0, 1.45608], [1.0, 1.0, 0.68677]],
        13 => &[
            [1.0, 1.0, 1.0],
            [1.0, 1.0, 0.875],
            [1.0, 1.14285, 1.14285],
            [1.0, 0.875, 1.0],
        ],
        14 => &[[1.0, 0.4852, 0.8251], [1.0, 2.0606, 1.700349]],
        15 => &[
            [1.0, 1.0, 1.0],
            [1.0, 3.5, 1.0],
            [1.0, 1.0, 3.5],
            [1.0, 0.28571, 0.28571],
        ],
        _ => return None,
    };
    Some(v.to_vec())
}

fn gws_list(id: u8, params: GwsParams) -> Option<Vec<Vec<f64>>> {
    let list = |v: &[[f64; 2]]| Some(v.iter().map(|p| p.to_vec()).collect());
    match (id, params) {
        (2, GwsParams::Klm { k, l, m, .. }) => {
            let (k, l, m) = (k as f64, l as f64, m as f64);
            list(&[
                [(k + m) / (k + l), (l + m) / (k + l)],
                [(k + m) / (k + l), (2.0 * k + l + m) / (k + l)],
                [(k + 2.0 * l + m) / (k + l), (l + m) / (k + l)],
                [(k + m) / (k + l + 2.0 * m), (l + m) / (k + l + 2.0 * m)],
            ])
        }
        (3, GwsParams::Klm { k: 1, l: 2, m: 3, .. }) => list(&[
            [3.26361, 1.60389],
            [1.30670, 3.18223],
            [1.23251, 1.39606],
            [0.38050, 0.46780],
        ]),
        (3, GwsParams::Klm { k: 2, l: 5, m: 7, .. }) => list(&[
            [2.94748, 1.67504],
            [1.27217, 2.71689],
            [1.24716, 1.53155],
            [0.40168, 0.52944],
        ]),
        (5, GwsParams::L { l }) => {
            let l = l as f64;
            list(&[
                [1.0, 2.0],
                [1.0, (2.0 * l - 4.0) / l],
                [l / (3.0 * l - 4.0), 2.0 * (l - 2.0) / (3.0 * l - 4.0)],
                [(3.0 * l - 4.0) / l, 2.0 * (l - 2.0) / l],
            ])
        }
        (8, _) => list(&[[0.864003, 0.483834], [1.46177, 1.884488]]),
        (12, _) => list(&[[1.0, 1.456083], [1.0, 0.686773]]),
        (14, _) => list(&[[0.485288, 0.825160], [2.060629, 1.700349]]),
        (id, GwsParams::Fixed) => exceptional_wallach(id).map(|v| v.iter().map(|m| vec![m[1], m[2]]).collect()),
        _ => None,
    }
}

fn stiefel_printed(k2: u32, k3: u32) -> Option<&'static [[f64; 3]]> {
    let v: &[[f64; 3]] = match (k2, k3) {
        (4, 2) => &[
            [4.1466, 4.07919, 1.03361],
            [2.29783, 3.43436, 3.98856],
            [1.0, 2.54858, 2.54858],
            [1.0, 0.78475, 0.78475],
        ],
        (4, 3) => &[
            [5.39567, 4.8672, 2.16024],
            [2.31234, 4.49843, 4.93295],
            [1.0, 3.29099, 3.29099],
            [1.0, 0.709006, 0.709006],
        ],
        (5, 2) => &[
            [3.19365, 3.15771, 0.674502],
            [1.86343, 2.64311, 3.07833],
            [1.0, 2.20711, 2.20711],
            [1.0, 0.792893, 0.792893],
        ],
        (5, 3) => &[
            [3.99996, 3.71213, 1.41708],
            [1.89382, 3.36866, 3.73723],
            [1.0, 2.78078, 2.78078],
            [1.0, 0.719224, 0.719224],
        ],
        (6, 2) => &[
            [2.71186, 2.68928, 0.499721],
            [1.64442, 2.25706, 2.6166],
            [1.0, 2.0, 2.0],
            [0.95544, 0.798009, 0.734193],
            [0.805105, 0.771014, 0.379868],
            [1.0, 0.8, 0.8],
        ],
        (6, 3) => &[
            [3.30651, 3.12526, 1.05079],
            [1.67763, 2.81537, 3.13489],
            [1.0, 2.47178, 2.47178],
            [1.0, 0.72822, 0.72822],
        ],
        (7, 2) => &[
            [2.41937, 2.40377, 0.396819],
            [1.51286, 2.02874, 2.33539],
            [1.0, 1.86038, 1.86038],
            [1.0, 0.806287, 0.806287],
            [0.98506, 0.805755, 0.78523],
            [0.791817, 0.770023, 0.312754],
        ],
        (7, 3) => &[
            [2.89171, 2.76727, 0.833614],
            [1.54531, 2.48719, 2.76871],
            [1.0, 2.26376, 2.26376],
            [1.0, 0.736237, 0.736237],
        ],
        _ => return None,
    };
    Some(v)
}

/// Stiefel block parameters `(k2, k3)` with a published list.
pub const STIEFEL_LISTED: [(u32, u32); 8] = [(4, 2), (4, 3), (5, 2), (5, 3), (6, 2), (6, 3), (7, 2), (7, 3)];

/// Convert printed Stiefel chart coordinates `(x_12, x_23, x_13) / x_2` to
/// `(x_12, x_13, x_23) / x_2`.
pub fn stiefel_from_printed(z: &[f64]) -> Vec<f64> {
    vec![z[0], z[2], z[1]]
}

/// Einstein metrics `(x_2, x_12, x_13, x_23)` on `V_5 R^7`.
pub const V5R7_METRICS: [[f64; 4]; 4] = [
    [1.27429, 1.27429, 1.0, 1.0],
    [0.392375, 0.392375, 1.0, 1.0],
    [0.245146, 1.01652, 0.253386, 1.0],
    [0.291175, 0.669071, 1.16137, 1.0],
];

fn flag_list(id: FlagId) -> Vec<Vec<f64>> {
    let v: &[[f64; 3]] = match id {
        FlagId::F4 => &[[0.970488, 0.229171, 1.0097], [1.27614, 1.95786, 2.31788]],
        FlagId::E7 => &[[0.823351, 1.29423, 1.34989], [0.991279, 0.578307, 1.13127]],
        FlagId::E8a6 => &[[0.91333, 1.41368, 1.51968], [0.966311, 0.489832, 1.08091]],
        FlagId::E8a3 => &[
            [0.649612, 1.10943, 1.06103],
            [0.763357, 1.00902, 0.191009],
            [1.15607, 1.01783, 0.214618],
            [1.09705, 0.770347, 1.29696],
        ],
    };
    let mut out = vec![vec![2.0, 3.0, 4.0]];
    out.extend(v.iter().map(|p| p.to_vec()));
    out
}

/// Published or closed-form fixed points at infinity for `spec`, in `U_1`
/// coordinates ordered like the space's summands.
pub fn known_fixed_points(spec: &SpaceSpec) -> Option<Vec<Vec<f64>>> {
    match *spec {
        SpaceSpec::Gws { id, params } => gws_list(id, params),
        SpaceSpec::StiefelV2 { n } => {
            let t = (n as f64 - 1.0) / (2.0 * (n as f64 - 2.0));
            Some(vec![vec![t, t]])
        }
        SpaceSpec::StiefelBlock { k2, k3, .. } => {
            stiefel_printed(k2, k3).map(|v| v.iter().map(|p| stiefel_from_printed(p)).collect())
        }
        SpaceSpec::Flag4(id) => Some(flag_list(id)),
    }
}
