//! Population moments and standardized mixed central moments.
//!
//! Two divisor conventions live side by side here and must not be mixed up:
//!
//! * `S²` (and everything derived from it: `C = S / mean`, `ρ`) uses `N − 1`;
//! * the central moments `μ_pqm` behind the standardized table `δ_pqm` use `N`.
//!
//! `δ_pqm = μ_pqm / (μ_200^{p/2} μ_020^{q/2} μ_002^{m/2})`, where the first
//! index belongs to `y`, the second to `x` and the third to `z`.

mod normal;
mod params;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use normal::{normal_theory_moments, trivariate_normal_moments};
pub use params::{moments_from_params, ParamDocument};

/// Exponent triple `(p, q, m)` of a mixed central moment of `(y, x, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MomentIndex {
    pub p: u8,
    pub q: u8,
    pub m: u8,
}

impl MomentIndex {
    pub const fn new(p: u8, q: u8, m: u8) -> Self {
        MomentIndex { p, q, m }
    }

    pub fn order(self) -> u8 {
        self.p + self.q + self.m
    }

    /// Parameter-document key, e.g. `d_030`.
    pub fn key(self) -> String {
        self.to_string()
    }

    /// Every triple of order 2 through 4, in lexicographic order.
    pub fn all_up_to_fourth() -> Vec<MomentIndex> {
        let mut out = Vec::with_capacity(31);
        for p in 0..=4u8 {
            for q in 0..=4u8 {
                for m in 0..=4u8 {
                    let order = p + q + m;
                    if (2..=4).contains(&order) {
                        out.push(MomentIndex::new(p, q, m));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d_{}{}{}", self.p, self.q, self.m)
    }
}

impl FromStr for MomentIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s.strip_prefix("d_").unwrap_or(s);
        let bytes = digits.as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(Error::InvalidParameter(format!(
                "`{s}` is not a moment key of the form d_pqm"
            )));
        }
        Ok(MomentIndex::new(
            bytes[0] - b'0',
            bytes[1] - b'0',
            bytes[2] - b'0',
        ))
    }
}

/// Table of standardized moments `δ_pqm`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeltaTable(BTreeMap<MomentIndex, f64>);

impl DeltaTable {
    pub fn new() -> Self {
        DeltaTable(BTreeMap::new())
    }

    pub fn get(&self, p: u8, q: u8, m: u8) -> Option<f64> {
        self.0.get(&MomentIndex::new(p, q, m)).copied()
    }

    /// Like [`get`](Self::get) but reports the missing key by name.
    pub fn require(&self, p: u8, q: u8, m: u8) -> Result<f64> {
        let idx = MomentIndex::new(p, q, m);
        self.0
            .get(&idx)
            .copied()
            .ok_or_else(|| Error::MissingParameter(idx.key()))
    }

    pub fn insert(&mut self, idx: MomentIndex, value: f64) -> Option<f64> {
        self.0.insert(idx, value)
    }

    pub fn contains(&self, idx: MomentIndex) -> bool {
        self.0.contains_key(&idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = (MomentIndex, f64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The full finite population: study variable `y`, auxiliaries `x` and `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationFrame {
    y: Vec<f64>,
    x: Vec<f64>,
    z: Vec<f64>,
}

impl PopulationFrame {
    pub const MIN_UNITS: usize = 4;

    pub fn new(y: Vec<f64>, x: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if y.len() != x.len() || y.len() != z.len() {
            return Err(Error::InvalidFrame(format!(
                "column lengths differ (y: {}, x: {}, z: {})",
                y.len(),
                x.len(),
                z.len()
            )));
        }
        if y.len() < Self::MIN_UNITS {
            return Err(Error::InvalidFrame(format!(
                "need at least {} units, got {}",
                Self::MIN_UNITS,
                y.len()
            )));
        }
        for (name, col) in [("y", &y), ("x", &x), ("z", &z)] {
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidFrame(format!("{name}[{i}] is not finite")));
            }
        }
        for (name, col) in [("y", &y), ("x", &x), ("z", &z)] {
            let first = col[0];
            if col.iter().all(|&v| v == first) {
                return Err(Error::DegenerateVariable(name));
            }
        }
        Ok(PopulationFrame { y, x, z })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }
}

/// Population-level parameters consumed by the variance formulas.
///
/// Fields are optional because a set may be ingested from published summary
/// parameters rather than computed from data; accessors such as
/// [`c_x`](Self::c_x) turn an absent field into [`Error::MissingParameter`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentSet {
    pub population_size: Option<usize>,
    pub mean_y: Option<f64>,
    pub mean_x: Option<f64>,
    pub mean_z: Option<f64>,
    /// `S_y²`, divisor `N − 1`.
    pub var_y: Option<f64>,
    pub var_x: Option<f64>,
    pub var_z: Option<f64>,
    pub cv_y: Option<f64>,
    pub cv_x: Option<f64>,
    pub cv_z: Option<f64>,
    pub rho_yx: Option<f64>,
    pub rho_xz: Option<f64>,
    pub rho_yz: Option<f64>,
    pub delta: DeltaTable,
    /// Interpretation notes attached during ingestion, carried into reports.
    pub notes: Vec<String>,
}

impl MomentSet {
    pub fn c_x(&self) -> Result<f64> {
        match (self.cv_x, self.mean_x) {
            (Some(c), _) => Ok(c),
            (None, Some(0.0)) => Err(Error::ZeroMean("x")),
            _ => Err(Error::MissingParameter("C_x".into())),
        }
    }

    pub fn c_z(&self) -> Result<f64> {
        match (self.cv_z, self.mean_z) {
            (Some(c), _) => Ok(c),
            (None, Some(0.0)) => Err(Error::ZeroMean("z")),
            _ => Err(Error::MissingParameter("C_z".into())),
        }
    }

    pub fn rho(&self) -> Result<f64> {
        self.rho_yx
            .ok_or_else(|| Error::MissingParameter("rho_yx".into()))
    }

    pub fn d(&self, p: u8, q: u8, m: u8) -> Result<f64> {
        self.delta.require(p, q, m)
    }

    /// Sets the coefficients of variation of `x` and `z`.
    pub fn with_cv(mut self, c_x: f64, c_z: f64) -> Self {
        self.cv_x = Some(c_x);
        self.cv_z = Some(c_z);
        self
    }

    /// Fills an absent `δ_310` with the value given for `δ_300`, recording a note.
    ///
    /// Returns whether the substitution happened.
    pub fn apply_delta310_from_delta300(&mut self) -> bool {
        let target = MomentIndex::new(3, 1, 0);
        if self.delta.contains(target) {
            self.notes
                .push("d_310 present in input; --delta310-from-delta300 had no effect".to_string());
            return false;
        }
        match self.delta.get(3, 0, 0) {
            Some(v) => {
                self.delta.insert(target, v);
                self.notes.push(format!(
                    "interpretation: d_310 is absent from the input and was set to d_300 = {v}; \
                     values depending on d_310 (Var(r) and everything built on it) rest on this reading"
                ));
                true
            }
            None => false,
        }
    }
}

/// Raw central moments of three columns, divisor = number of units.
pub(crate) struct CentralMoments {
    pub means: [f64; 3],
    pub mu2: [f64; 3],
    pub delta: DeltaTable,
}

/// Two-pass computation of means and the standardized moment table over
/// all triples of order 2–4.
pub(crate) fn central_moments(y: &[f64], x: &[f64], z: &[f64]) -> CentralMoments {
    let n = y.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let means = [mean(y), mean(x), mean(z)];

    let triples = MomentIndex::all_up_to_fourth();
    let mut sums = vec![0.0f64; triples.len()];
    for i in 0..y.len() {
        let dev = [y[i] - means[0], x[i] - means[1], z[i] - means[2]];
        let mut pw = [[1.0f64; 5]; 3];
        for (k, d) in dev.iter().enumerate() {
            for e in 1..5 {
                pw[k][e] = pw[k][e - 1] * d;
            }
        }
        for (s, t) in sums.iter_mut().zip(&triples) {
            *s += pw[0][t.p as usize] * pw[1][t.q as usize] * pw[2][t.m as usize];
        }
    }
    let mu: Vec<f64> = sums.iter().map(|s| s / n).collect();
    let lookup = |p, q, m| {
        let idx = triples
            .iter()
            .position(|t| *t == MomentIndex::new(p, q, m))
            .expect("second-order triple present");
        mu[idx]
    };
    let mu2 = [lookup(2, 0, 0), lookup(0, 2, 0), lookup(0, 0, 2)];
    let sd = [mu2[0].sqrt(), mu2[1].sqrt(), mu2[2].sqrt()];

    let mut delta = DeltaTable::new();
    for (t, &raw) in triples.iter().zip(&mu) {
        let value = match (t.p, t.q, t.m) {
            (2, 0, 0) | (0, 2, 0) | (0, 0, 2) => 1.0,
            (1, 1, 0) => raw / (mu2[0] * mu2[1]).sqrt(),
            (1, 0, 1) => raw / (mu2[0] * mu2[2]).sqrt(),
            (0, 1, 1) => raw / (mu2[1] * mu2[2]).sqrt(),
            _ => raw / (sd[0].powi(t.p as i32) * sd[1].powi(t.q as i32) * sd[2].powi(t.m as i32)),
        };
        delta.insert(*t, value);
    }
    CentralMoments { means, mu2, delta }
}

/// Exact population parameters of a frame.
pub fn population_moments(frame: &PopulationFrame) -> Result<MomentSet> {
    let cm = central_moments(frame.y(), frame.x(), frame.z());
    let n = frame.len();
    let to_s2 = n as f64 / (n as f64 - 1.0);
    let names = ["y", "x", "z"];
    for (k, name) in names.iter().enumerate() {
        if !(cm.mu2[k] > 0.0) {
            return Err(Error::DegenerateVariable(name));
        }
    }
    let var = [cm.mu2[0] * to_s2, cm.mu2[1] * to_s2, cm.mu2[2] * to_s2];
    let cv = |k: usize| (cm.means[k] != 0.0).then(|| var[k].sqrt() / cm.means[k]);

    Ok(MomentSet {
        population_size: Some(n),
        mean_y: Some(cm.means[0]),
        mean_x: Some(cm.means[1]),
        mean_z: Some(cm.means[2]),
        var_y: Some(var[0]),
        var_x: Some(var[1]),
        var_z: Some(var[2]),
        cv_y: cv(0),
        cv_x: cv(1),
        cv_z: cv(2),
        rho_yx: cm.delta.get(1, 1, 0),
        rho_xz: cm.delta.get(0, 1, 1),
        rho_yz: cm.delta.get(1, 0, 1),
        delta: cm.delta,
        notes: Vec::new(),
    })
}

/// Lower bound `δ_4 − δ_3² − 1` for the marginal of one variable, if both
/// entries are present.
pub(crate) fn kurtosis_margin(delta: &DeltaTable, var: usize) -> Option<f64> {
    let (third, fourth) = match var {
        0 => (MomentIndex::new(3, 0, 0), MomentIndex::new(4, 0, 0)),
        1 => (MomentIndex::new(0, 3, 0), MomentIndex::new(0, 4, 0)),
        _ => (MomentIndex::new(0, 0, 3), MomentIndex::new(0, 0, 4)),
    };
    let d4 = delta.0.get(&fourth)?;
    let d3 = delta.0.get(&third).copied().unwrap_or(0.0);
    Some(d4 - d3 * d3 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> PopulationFrame {
        PopulationFrame::new(
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 9.0],
            vec![2.0, 1.0, 4.0, 3.0, 8.0, 6.0],
            vec![1.0, 3.0, 2.0, 5.0, 4.0, 8.0],
        )
        .unwrap()
    }

    #[test]
    fn identical_columns_correlate_perfectly() {
        let v = vec![1.0, 4.0, 2.0, 8.0, 5.0];
        let frame = PopulationFrame::new(v.clone(), v, vec![3.0, 1.0, 4.0, 1.0, 5.0]).unwrap();
        let m = population_moments(&frame).unwrap();
        assert_eq!(m.rho_yx, Some(1.0));
    }

    #[test]
    fn self_normalization_is_exact() {
        let m = population_moments(&fixture()).unwrap();
        assert_eq!(m.delta.get(2, 0, 0), Some(1.0));
        assert_eq!(m.delta.get(0, 2, 0), Some(1.0));
        assert_eq!(m.delta.get(0, 0, 2), Some(1.0));
        assert_eq!(m.delta.get(1, 1, 0), m.rho_yx);
        assert_eq!(m.delta.get(1, 0, 1), m.rho_yz);
        assert_eq!(m.delta.get(0, 1, 1), m.rho_xz);
    }

    #[test]
    fn table_covers_every_triple_the_formulas_use() {
        let m = population_moments(&fixture()).unwrap();
        for key in [
            "030", "040", "003", "004", "210", "120", "130", "220", "201", "021", "111", "012",
            "112", "202", "022", "310", "400", "300", "102",
        ] {
            let idx: MomentIndex = key.parse().unwrap();
            assert!(m.delta.contains(idx), "missing {idx}");
        }
        assert_eq!(m.delta.len(), 31);
    }

    #[test]
    fn kurtosis_skewness_inequality_holds() {
        let m = population_moments(&fixture()).unwrap();
        for var in 0..3 {
            assert!(kurtosis_margin(&m.delta, var).unwrap() >= 0.0);
        }
    }

    #[test]
    fn divisor_conventions_are_kept_apart() {
        let m = population_moments(&fixture()).unwrap();
        // y = 1,2,3,4,5,9: mean 4, squared deviations sum to 40.
        assert_eq!(m.mean_y, Some(4.0));
        assert_eq!(m.var_y, Some(8.0));
        assert!((m.cv_y.unwrap() - 8f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn zero_mean_only_fails_when_cv_is_requested() {
        let frame = PopulationFrame::new(
            vec![1.0, 2.0, 3.0, 5.0],
            vec![-1.0, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 2.0, 4.0],
        )
        .unwrap();
        let m = population_moments(&frame).unwrap();
        assert_eq!(m.c_x(), Err(Error::ZeroMean("x")));
        assert!(m.c_z().is_ok());
    }

    #[test]
    fn frame_validation() {
        let short = PopulationFrame::new(vec![1.0; 3], vec![1.0; 3], vec![1.0; 3]);
        assert!(matches!(short, Err(Error::InvalidFrame(_))));
        let flat = PopulationFrame::new(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![7.0; 4],
            vec![1.0, 2.0, 3.0, 4.0],
        );
        assert_eq!(flat, Err(Error::DegenerateVariable("x")));
        let nan = PopulationFrame::new(
            vec![1.0, 2.0, f64::NAN, 4.0],
            vec![1.0, 2.0, 3.0, 4.0],
            vec![1.0, 2.0, 3.0, 4.0],
        );
        assert!(matches!(nan, Err(Error::InvalidFrame(_))));
        let ragged = PopulationFrame::new(vec![1.0; 5], vec![1.0; 4], vec![1.0; 4]);
        assert!(matches!(ragged, Err(Error::InvalidFrame(_))));
    }

    #[test]
    fn moment_index_text_form() {
        let idx: MomentIndex = "d_310".parse().unwrap();
        assert_eq!(idx, MomentIndex::new(3, 1, 0));
        assert_eq!(idx.to_string(), "d_310");
        assert!("d_31".parse::<MomentIndex>().is_err());
        assert!("rho".parse::<MomentIndex>().is_err());
    }

    #[test]
    fn delta310_substitution_is_noted() {
        let mut m = MomentSet::default();
        m.delta.insert(MomentIndex::new(3, 0, 0), 0.1301);
        assert!(m.apply_delta310_from_delta300());
        assert_eq!(m.d(3, 1, 0), Ok(0.1301));
        assert_eq!(m.notes.len(), 1);
        assert!(!m.apply_delta310_from_delta300());
    }
}
