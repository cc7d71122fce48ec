//! First-order variance expressions (finite population correction ignored),
//! optimum constants, minimum variances and percent relative efficiencies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{ConstantInputs, OptimumConstants};
use crate::moments::MomentSet;
use crate::published::{self, PublishedComparison};

pub use crate::estimators::Abdf;

fn check_sizes(n: usize, n1: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDesign(format!("n = {n} must be at least 2")));
    }
    if n1 < n {
        return Err(Error::InvalidDesign(format!(
            "n1 = {n1} is smaller than n = {n}"
        )));
    }
    Ok(())
}

pub fn constants_abdf(m: &MomentSet) -> Result<Abdf> {
    ConstantInputs::from_moments(m)?.abdf()
}

pub fn optimum_constants(m: &MomentSet) -> Result<OptimumConstants> {
    ConstantInputs::from_moments(m)?.optimum()
}

/// First-order variance of the sample correlation coefficient.
///
/// Evaluated as `(1/n)[δ_220 + (ρ²/4)(δ_040 + δ_400 + 2δ_220) − ρ(δ_130 + δ_310)]`,
/// which is the usual `(ρ²/n)[δ_220/ρ² + …]` form with `ρ²` distributed so
/// that `ρ = 0` is not a special case.
pub fn var_r(m: &MomentSet, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDesign(format!("n = {n} must be at least 2")));
    }
    let rho = m.rho()?;
    let d220 = m.d(2, 2, 0)?;
    let d040 = m.d(0, 4, 0)?;
    let d400 = m.d(4, 0, 0)?;
    let d130 = m.d(1, 3, 0)?;
    let d310 = m.d(3, 1, 0)?;
    Ok((d220 + rho * rho / 4.0 * (d040 + d400 + 2.0 * d220) - rho * (d130 + d310)) / n as f64)
}

/// `C_x² t1² + (δ_040 − 1) t2² − A t1 − B t2 + 2 δ_030 C_x t1 t2`
fn x_quadratic(k: &ConstantInputs, abdf: &Abdf, t1: f64, t2: f64) -> f64 {
    k.cx * k.cx * t1 * t1 + (k.d040 - 1.0) * t2 * t2 - abdf.a * t1 - abdf.b * t2
        + 2.0 * k.d030 * k.cx * t1 * t2
}

/// First-order variance of `r t(u, v, w, a)` for arbitrary first partial
/// derivatives `(t1, t2, t3, t4)` of `t` at `(1, 1, 1, 1)`.
pub fn var_t_class(m: &MomentSet, n: usize, n1: usize, derivs: [f64; 4]) -> Result<f64> {
    check_sizes(n, n1)?;
    let base = var_r(m, n)?;
    let k = ConstantInputs::from_moments(m)?;
    let abdf = k.abdf()?;
    let [t1, t2, t3, t4] = derivs;
    let rho2 = k.rho * k.rho;
    let second_phase = x_quadratic(&k, &abdf, t1, t2);
    let first_phase = k.cx * k.cx * t1 * t1 + (k.d040 - 1.0) * t2 * t2
        - k.cz * k.cz * t3 * t3
        - (k.d004 - 1.0) * t4 * t4
        - abdf.a * t1
        - abdf.b * t2
        + abdf.d * t3
        + abdf.f * t4
        + 2.0 * k.d030 * k.cx * t1 * t2
        - 2.0 * k.d003 * k.cz * t3 * t4;
    Ok(base + rho2 / n as f64 * second_phase - rho2 / n1 as f64 * first_phase)
}

/// First-order variance of `r h(u, v)` for derivatives `(h1, h2)` at `(1, 1)`.
pub fn var_h_class(m: &MomentSet, n: usize, n1: usize, derivs: [f64; 2]) -> Result<f64> {
    check_sizes(n, n1)?;
    let base = var_r(m, n)?;
    let k = ConstantInputs::from_moments(m)?;
    let abdf = k.abdf()?;
    let factor = 1.0 / n as f64 - 1.0 / n1 as f64;
    Ok(base + factor * k.rho * k.rho * x_quadratic(&k, &abdf, derivs[0], derivs[1]))
}

/// `A²/(4C_x²) + {(A/C_x)δ_030 − B}² / (4(δ_040 − δ_030² − 1))`
fn x_reduction(k: &ConstantInputs, abdf: &Abdf) -> Result<f64> {
    let kx = k.x_margin()?;
    let t = abdf.a / k.cx * k.d030 - abdf.b;
    Ok(abdf.a * abdf.a / (4.0 * k.cx * k.cx) + t * t / (4.0 * kx))
}

/// `D²/(4C_z²) + {(D/C_z)δ_003 − F}² / (4(δ_004 − δ_003² − 1))`
fn z_reduction(k: &ConstantInputs, abdf: &Abdf) -> Result<f64> {
    let kz = k.z_margin()?;
    let t = abdf.d / k.cz * k.d003 - abdf.f;
    Ok(abdf.d * abdf.d / (4.0 * k.cz * k.cz) + t * t / (4.0 * kz))
}

pub fn min_var_hd(m: &MomentSet, n: usize, n1: usize) -> Result<f64> {
    check_sizes(n, n1)?;
    let base = var_r(m, n)?;
    let k = ConstantInputs::from_moments(m)?;
    let abdf = k.abdf()?;
    let factor = 1.0 / n as f64 - 1.0 / n1 as f64;
    Ok(base - factor * k.rho * k.rho * x_reduction(&k, &abdf)?)
}

pub fn min_var_td(m: &MomentSet, n: usize, n1: usize) -> Result<f64> {
    check_sizes(n, n1)?;
    let base = var_r(m, n)?;
    let k = ConstantInputs::from_moments(m)?;
    let abdf = k.abdf()?;
    let rho2 = k.rho * k.rho;
    let factor = 1.0 / n as f64 - 1.0 / n1 as f64;
    Ok(base - factor * rho2 * x_reduction(&k, &abdf)? - rho2 / n1 as f64 * z_reduction(&k, &abdf)?)
}

/// `min Var(ρ̂_hd) − min Var(ρ̂_td)` in closed form; never negative.
pub fn variance_gap(m: &MomentSet, n: usize, n1: usize) -> Result<f64> {
    check_sizes(n, n1)?;
    let k = ConstantInputs::from_moments(m)?;
    let abdf = k.abdf()?;
    Ok(k.rho * k.rho / n1 as f64 * z_reduction(&k, &abdf)?)
}

/// Percent relative efficiency `100 · var_base / var_est`.
pub fn pre(var_base: f64, var_est: f64) -> Result<f64> {
    if !(var_est > 0.0) {
        return Err(Error::NonPositiveVariance(var_est));
    }
    Ok(100.0 * var_base / var_est)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportInputs {
    pub n: usize,
    pub n1: usize,
    #[serde(rename = "C_x")]
    pub c_x: f64,
    #[serde(rename = "C_z")]
    pub c_z: f64,
    pub rho_yx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceReport {
    pub inputs: ReportInputs,
    pub var_r: f64,
    pub var_hd_min: f64,
    pub var_td_min: f64,
    pub gap: f64,
    pub pre_hd: f64,
    pub pre_td: f64,
    pub constants: OptimumConstants,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub published: Option<PublishedComparison>,
    #[serde(rename = "notes")]
    pub interpretation_notes: Vec<String>,
}

/// Variances and PREs of `r`, the optimum `ρ̂_hd` and the optimum `ρ̂_td`.
///
/// When the moment set is the published Murthy (1967) parameter list, the
/// published PREs are embedded next to the computed ones.
pub fn efficiency_report(m: &MomentSet, n: usize, n1: usize) -> Result<VarianceReport> {
    let var_r = var_r(m, n)?;
    let var_hd_min = min_var_hd(m, n, n1)?;
    let var_td_min = min_var_td(m, n, n1)?;
    let gap = variance_gap(m, n, n1)?;
    let pre_hd = pre(var_r, var_hd_min)?;
    let pre_td = pre(var_r, var_td_min)?;
    let mut notes = m.notes.clone();
    let published = if published::is_murthy_parameter_set(m) {
        let cmp = PublishedComparison::murthy(n, n1, pre_hd, pre_td);
        notes.push(cmp.discrepancy_note());
        Some(cmp)
    } else {
        None
    };
    Ok(VarianceReport {
        inputs: ReportInputs {
            n,
            n1,
            c_x: m.c_x()?,
            c_z: m.c_z()?,
            rho_yx: m.rho()?,
        },
        var_r,
        var_hd_min,
        var_td_min,
        gap,
        pre_hd,
        pre_td,
        constants: optimum_constants(m)?,
        published,
        interpretation_notes: notes,
    })
}
