//! Published summary parameters for Murthy's (1967, p. 226) factory data
//! (y = output, x = number of workers, z = fixed capital) and the PREs
//! published for them at `n = 10`, `n1 = 25`.
//!
//! The raw data are not available; only these summaries are.

use serde::Serialize;

use crate::moments::{MomentSet, ParamDocument};

/// Parameter list as published, key for key. `d_310` is not among them.
pub const MURTHY_1967: &[(&str, f64)] = &[
    ("N", 80.0),
    ("n", 10.0),
    ("n1", 25.0),
    ("mean_x", 283.875),
    ("mean_y", 5182.638),
    ("mean_z", 1126.0),
    ("C_x", 0.9430),
    ("C_y", 0.3520),
    ("C_z", 0.7460),
    ("d_003", 1.030),
    ("d_004", 2.8664),
    ("d_021", 1.1859),
    ("d_022", 3.1522),
    ("d_030", 1.295),
    ("d_040", 3.65),
    ("d_102", 0.7491),
    ("d_120", 0.9145),
    ("d_111", 0.8234),
    ("d_130", 2.8525),
    ("d_112", 2.5454),
    ("d_210", 0.5475),
    ("d_220", 2.3377),
    ("d_201", 0.4546),
    ("d_202", 2.2208),
    ("d_300", 0.1301),
    ("d_400", 2.2667),
    ("rho_yx", 0.9136),
    ("rho_xz", 0.9859),
    ("rho_yz", 0.9413),
];

pub const PUBLISHED_N: usize = 10;
pub const PUBLISHED_N1: usize = 25;
pub const PUBLISHED_PRE_R: f64 = 100.0;
pub const PUBLISHED_PRE_HD: f64 = 129.147;
pub const PUBLISHED_PRE_TD: f64 = 305.441;

pub fn murthy_1967_document() -> ParamDocument {
    ParamDocument(
        MURTHY_1967
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
    )
}

/// True when every published parameter that a moment set can hold matches.
pub fn is_murthy_parameter_set(m: &MomentSet) -> bool {
    let doc = ParamDocument::from_moments(m);
    MURTHY_1967
        .iter()
        .filter(|(k, _)| !matches!(*k, "n" | "n1"))
        .all(|(k, v)| doc.get(k) == Some(*v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublishedComparison {
    pub n: usize,
    pub n1: usize,
    pub pre_r: f64,
    pub pre_hd: f64,
    pub pre_td: f64,
    /// Computed minus published; present only when the design sizes match.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_pre_hd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_pre_td: Option<f64>,
    #[serde(skip)]
    computed: (f64, f64),
}

impl PublishedComparison {
    pub fn murthy(n: usize, n1: usize, computed_hd: f64, computed_td: f64) -> Self {
        let same_design = n == PUBLISHED_N && n1 == PUBLISHED_N1;
        PublishedComparison {
            n: PUBLISHED_N,
            n1: PUBLISHED_N1,
            pre_r: PUBLISHED_PRE_R,
            pre_hd: PUBLISHED_PRE_HD,
            pre_td: PUBLISHED_PRE_TD,
            delta_pre_hd: same_design.then_some(computed_hd - PUBLISHED_PRE_HD),
            delta_pre_td: same_design.then_some(computed_td - PUBLISHED_PRE_TD),
            computed: (computed_hd, computed_td),
        }
    }

    pub fn discrepancy_note(&self) -> String {
        let (hd, td) = self.computed;
        let ordering = if td >= hd && hd >= 100.0 {
            "holds"
        } else {
            "does not hold"
        };
        format!(
            "discrepancy: the published PREs for this parameter set (r {}, hd {}, td {} at n = {}, n1 = {}) \
             are not reproduced by the first-order formulas from the listed parameters; computed PREs are \
             hd {hd:.3}, td {td:.3}. No single-typo reading of the list found reproduces the published values \
             (d_310 is not listed). The published ordering td >= hd >= 100 {ordering} for the computed values",
            self.pre_r, self.pre_hd, self.pre_td, self.n, self.n1
        )
    }
}
