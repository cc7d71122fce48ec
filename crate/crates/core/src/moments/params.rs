use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{kurtosis_margin, DeltaTable, MomentIndex, MomentSet};
use crate::error::{Error, Result};

/// Flat key/value parameter document.
///
/// Recognised keys: `C_x`, `C_y`, `C_z`, `rho_yx`, `rho_xz`, `rho_yz`,
/// `mean_y`, `mean_x`, `mean_z`, `S2_y`, `S2_x`, `S2_z`, `N`, `n`, `n1`, and
/// any `d_pqm` moment key. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamDocument(pub BTreeMap<String, f64>);

const SCALAR_KEYS: &[&str] = &[
    "C_x", "C_y", "C_z", "rho_yx", "rho_xz", "rho_yz", "mean_y", "mean_x", "mean_z", "S2_y",
    "S2_x", "S2_z", "N", "n", "n1",
];

impl ParamDocument {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(Some(v as usize)),
            Some(v) => Err(Error::InvalidParameter(format!(
                "`{key}` = {v} is not a count"
            ))),
        }
    }

    /// Second- and first-phase sizes, when the document carries them.
    pub fn design_hint(&self) -> Result<(Option<usize>, Option<usize>)> {
        Ok((self.count("n")?, self.count("n1")?))
    }

    /// Serializes a moment set to the document form read by
    /// [`moments_from_params`]. Notes are not carried.
    pub fn from_moments(m: &MomentSet) -> Self {
        let mut doc = BTreeMap::new();
        let mut put = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                doc.insert(k.to_string(), v);
            }
        };
        put("N", m.population_size.map(|n| n as f64));
        put("mean_y", m.mean_y);
        put("mean_x", m.mean_x);
        put("mean_z", m.mean_z);
        put("S2_y", m.var_y);
        put("S2_x", m.var_x);
        put("S2_z", m.var_z);
        put("C_y", m.cv_y);
        put("C_x", m.cv_x);
        put("C_z", m.cv_z);
        put("rho_yx", m.rho_yx);
        put("rho_xz", m.rho_xz);
        put("rho_yz", m.rho_yz);
        for (idx, v) in m.delta.iter() {
            doc.insert(idx.key(), v);
        }
        ParamDocument(doc)
    }
}

fn check_correlation(key: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(r) if !(-1.0..=1.0).contains(&r) => Err(Error::InvalidParameter(format!(
            "`{key}` = {r} is outside [-1, 1]"
        ))),
        _ => Ok(()),
    }
}

/// Builds a [`MomentSet`] from published summary parameters.
///
/// Fields the document does not give stay absent. The standardized second
/// moments `δ_200`, `δ_020`, `δ_002` are always 1; `δ_110`, `δ_101`, `δ_011`
/// are filled from the correlations when not given explicitly.
pub fn moments_from_params(doc: &ParamDocument) -> Result<MomentSet> {
    let mut delta = DeltaTable::new();
    for (key, &value) in &doc.0 {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("`{key}` is not finite")));
        }
        if SCALAR_KEYS.contains(&key.as_str()) {
            continue;
        }
        if !key.starts_with("d_") {
            return Err(Error::InvalidParameter(format!("unknown key `{key}`")));
        }
        let idx: MomentIndex = key.parse()?;
        if idx.order() < 2 {
            return Err(Error::InvalidParameter(format!(
                "`{key}`: standardized moments of order below 2 are not parameters"
            )));
        }
        delta.insert(idx, value);
    }

    let rho_yx = doc.get("rho_yx");
    let rho_xz = doc.get("rho_xz");
    let rho_yz = doc.get("rho_yz");
    check_correlation("rho_yx", rho_yx)?;
    check_correlation("rho_xz", rho_xz)?;
    check_correlation("rho_yz", rho_yz)?;

    for idx in [
        MomentIndex::new(2, 0, 0),
        MomentIndex::new(0, 2, 0),
        MomentIndex::new(0, 0, 2),
    ] {
        if let Some(v) = delta.get(idx.p, idx.q, idx.m) {
            if (v - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "`{idx}` = {v} must equal 1"
                )));
            }
        }
        delta.insert(idx, 1.0);
    }
    for (idx, rho, name) in [
        (MomentIndex::new(1, 1, 0), rho_yx, "rho_yx"),
        (MomentIndex::new(1, 0, 1), rho_yz, "rho_yz"),
        (MomentIndex::new(0, 1, 1), rho_xz, "rho_xz"),
    ] {
        match (delta.get(idx.p, idx.q, idx.m), rho) {
            (Some(d), Some(r)) if (d - r).abs() > 1e-9 => {
                return Err(Error::InvalidParameter(format!(
                    "`{idx}` = {d} disagrees with `{name}` = {r}"
                )));
            }
            (None, Some(r)) => {
                delta.insert(idx, r);
            }
            _ => {}
        }
    }

    for (var, label) in [
        (0, "y: d_400 - d_300^2 - 1"),
        (1, "x: d_040 - d_030^2 - 1"),
        (2, "z: d_004 - d_003^2 - 1"),
    ] {
        if let Some(margin) = kurtosis_margin(&delta, var) {
            if margin < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "kurtosis-skewness inequality violated for {label} = {margin:.6} < 0"
                )));
            }
        }
    }

    for key in ["S2_y", "S2_x", "S2_z"] {
        if let Some(v) = doc.get(key) {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "`{key}` = {v} must be positive"
                )));
            }
        }
    }
    for key in ["C_x", "C_z"] {
        if doc.get(key) == Some(0.0) {
            return Err(Error::InvalidParameter(format!("`{key}` must be non-zero")));
        }
    }

    Ok(MomentSet {
        population_size: doc.count("N")?,
        mean_y: doc.get("mean_y"),
        mean_x: doc.get("mean_x"),
        mean_z: doc.get("mean_z"),
        var_y: doc.get("S2_y"),
        var_x: doc.get("S2_x"),
        var_z: doc.get("S2_z"),
        cv_y: doc.get("C_y"),
        cv_x: doc.get("C_x"),
        cv_z: doc.get("C_z"),
        rho_yx,
        rho_xz,
        rho_yz,
        delta,
        notes: Vec::new(),
    })
}
