//! Point estimators of `ρ_yx` built from [`SampleStatistics`].
//!
//! All class members multiply `r` by a function `t(u, v, w, a)` with
//! `t(1, 1, 1, 1) = 1`, except the difference-type estimator, which adds a
//! linear correction to `r` instead. Estimates are returned unclamped.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::moments::{DeltaTable, MomentSet};
use crate::sampling::SampleStatistics;

/// Below this magnitude a correlation is treated as zero.
pub const ZERO_CORRELATION_TOL: f64 = 1e-9;
/// Relative tolerance for denominators that must stay away from zero.
pub const SINGULAR_REL_TOL: f64 = 1e-9;

/// Functional form of the plug-in optimum estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TdStarForm {
    /// `r u^α̂ v^β̂ w^γ̂ a^δ̂`
    Product,
    /// `r {1 + α̂(u−1) + γ̂(w−1)} / {1 − β̂(v−1) − δ̂(a−1)}`
    Ratio,
    /// `r [1 + α̂(u−1) + β̂(v−1) + γ̂(w−1) + δ̂(a−1)]`
    Linear,
    /// `r [1 − α̂(u−1) − β̂(v−1) − γ̂(w−1) − δ̂(a−1)]⁻¹`
    Inverse,
}

impl TdStarForm {
    pub const ALL: [TdStarForm; 4] = [
        TdStarForm::Product,
        TdStarForm::Ratio,
        TdStarForm::Linear,
        TdStarForm::Inverse,
    ];

    fn name(self) -> &'static str {
        match self {
            TdStarForm::Product => "product",
            TdStarForm::Ratio => "ratio",
            TdStarForm::Linear => "linear",
            TdStarForm::Inverse => "inverse",
        }
    }
}

/// Every estimator form the crate evaluates.
///
/// Constant arrays are ordered `(u, v, w, a)`, or `(u, v)` for the forms
/// that ignore `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorSpec {
    /// The sample correlation coefficient `r`.
    SampleR,
    /// `r (x̄*/x̄)(Z̄/z̄*)(s_x*²/s_x²)(S_z²/s_z*²)`.
    ChainRatio,
    /// `r (x̄/x̄*)^α1 (s_x²/s_x*²)^α2 (z̄*/Z̄)^α3 (s_z*²/S_z²)^α4`.
    GeneralizedPower([f64; 4]),
    /// `r [1 + α1(u−1) + α2(v−1)]`.
    HLinear([f64; 2]),
    /// `r u^α1 v^α2`.
    HPower([f64; 2]),
    /// `r [1 + α1(u−1) + α2(v−1) + α3(w−1) + α4(a−1)]`.
    TLinear([f64; 4]),
    /// `r u^α1 v^α2 w^α3 a^α4`.
    TPower([f64; 4]),
    /// Plug-in optimum estimator; constants estimated from the sample.
    TdStar(TdStarForm),
    /// `r + α1(u−1) + α2(v−1) + α3(w−1) + α4(a−1)`.
    DifferenceType([f64; 4]),
}

impl EstimatorSpec {
    /// Whether every constant is finite.
    pub fn is_valid(&self) -> bool {
        self.constants().iter().all(|c| c.is_finite())
    }

    pub fn constants(&self) -> Vec<f64> {
        match *self {
            EstimatorSpec::GeneralizedPower(c)
            | EstimatorSpec::TLinear(c)
            | EstimatorSpec::TPower(c)
            | EstimatorSpec::DifferenceType(c) => c.to_vec(),
            EstimatorSpec::HLinear(c) | EstimatorSpec::HPower(c) => c.to_vec(),
            _ => Vec::new(),
        }
    }
}

fn write_constants(f: &mut fmt::Formatter<'_>, name: &str, c: &[f64]) -> fmt::Result {
    write!(f, "{name}:")?;
    for (i, v) in c.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorSpec::SampleR => f.write_str("sample-r"),
            EstimatorSpec::ChainRatio => f.write_str("chain-ratio"),
            EstimatorSpec::GeneralizedPower(c) => write_constants(f, "generalized-power", c),
            EstimatorSpec::HLinear(c) => write_constants(f, "h-linear", c),
            EstimatorSpec::HPower(c) => write_constants(f, "h-power", c),
            EstimatorSpec::TLinear(c) => write_constants(f, "t-linear", c),
            EstimatorSpec::TPower(c) => write_constants(f, "t-power", c),
            EstimatorSpec::TdStar(form) => write!(f, "td-star:{}", form.name()),
            EstimatorSpec::DifferenceType(c) => write_constants(f, "difference", c),
        }
    }
}

fn parse_constants<const K: usize>(text: &str, args: Option<&str>) -> Result<[f64; K]> {
    let err = || Error::ParseEstimator(text.to_string());
    let args = args.ok_or_else(err)?;
    let values: Vec<f64> = args
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| err())?;
    let arr: [f64; K] = values.try_into().map_err(|_| err())?;
    if arr.iter().any(|v| !v.is_finite()) {
        return Err(err());
    }
    Ok(arr)
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    /// Parses the canonical text form, e.g. `chain-ratio`,
    /// `t-power:0.5,0.2,-0.1,0.3` or `td-star:product`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (text, None),
        };
        let no_args = |spec: EstimatorSpec| match args {
            None => Ok(spec),
            Some(_) => Err(Error::ParseEstimator(text.to_string())),
        };
        match name {
            "sample-r" | "r" => no_args(EstimatorSpec::SampleR),
            "chain-ratio" => no_args(EstimatorSpec::ChainRatio),
            "generalized-power" => Ok(EstimatorSpec::GeneralizedPower(parse_constants(
                text, args,
            )?)),
            "h-linear" => Ok(EstimatorSpec::HLinear(parse_constants(text, args)?)),
            "h-power" => Ok(EstimatorSpec::HPower(parse_constants(text, args)?)),
            "t-linear" => Ok(EstimatorSpec::TLinear(parse_constants(text, args)?)),
            "t-power" => Ok(EstimatorSpec::TPower(parse_constants(text, args)?)),
            "difference" => Ok(EstimatorSpec::DifferenceType(parse_constants(text, args)?)),
            "td-star" => {
                let form = match args {
                    Some("product") | Some("power") => TdStarForm::Product,
                    Some("ratio") => TdStarForm::Ratio,
                    Some("linear") => TdStarForm::Linear,
                    Some("inverse") => TdStarForm::Inverse,
                    _ => return Err(Error::ParseEstimator(text.to_string())),
                };
                Ok(EstimatorSpec::TdStar(form))
            }
            _ => Err(Error::ParseEstimator(text.to_string())),
        }
    }
}

impl Serialize for EstimatorSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EstimatorSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The `A, B, D, F` block entering the first-order variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Abdf {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

/// Variance-minimizing first derivatives `(α, β, γ, δ)` of `t` at
/// `(1, 1, 1, 1)`, with the `A, B, D, F` block they were computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumConstants {
    #[serde(flatten)]
    pub abdf: Abdf,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl OptimumConstants {
    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }
}

/// Moment inputs shared by the population constants and their sample
/// (plug-in) counterparts.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ConstantInputs {
    pub cx: f64,
    pub cz: f64,
    pub rho: f64,
    pub d030: f64,
    pub d040: f64,
    pub d003: f64,
    pub d004: f64,
    pub d210: f64,
    pub d120: f64,
    pub d220: f64,
    pub d130: f64,
    pub d201: f64,
    pub d021: f64,
    pub d111: f64,
    pub d202: f64,
    pub d022: f64,
    pub d112: f64,
}

impl ConstantInputs {
    pub fn gather(delta: &DeltaTable, cx: f64, cz: f64, rho: f64) -> Result<Self> {
        let d = |p, q, m| delta.require(p, q, m);
        Ok(ConstantInputs {
            cx,
            cz,
            rho,
            d030: d(0, 3, 0)?,
            d040: d(0, 4, 0)?,
            d003: d(0, 0, 3)?,
            d004: d(0, 0, 4)?,
            d210: d(2, 1, 0)?,
            d120: d(1, 2, 0)?,
            d220: d(2, 2, 0)?,
            d130: d(1, 3, 0)?,
            d201: d(2, 0, 1)?,
            d021: d(0, 2, 1)?,
            d111: d(1, 1, 1)?,
            d202: d(2, 0, 2)?,
            d022: d(0, 2, 2)?,
            d112: d(1, 1, 2)?,
        })
    }

    pub fn from_moments(m: &MomentSet) -> Result<Self> {
        Self::gather(&m.delta, m.c_x()?, m.c_z()?, m.rho()?)
    }

    pub fn abdf(&self) -> Result<Abdf> {
        let rho = self.rho;
        if !(rho.abs() >= ZERO_CORRELATION_TOL) {
            return Err(Error::ZeroCorrelation(rho.abs()));
        }
        Ok(Abdf {
            a: (self.d210 + self.d030 - 2.0 * (self.d120 / rho)) * self.cx,
            b: self.d220 + self.d040 - 2.0 * (self.d130 / rho),
            d: (self.d201 + self.d021 - 2.0 * (self.d111 / rho)) * self.cz,
            f: self.d202 + self.d022 - 2.0 * (self.d112 / rho),
        })
    }

    /// `δ_040 − δ_030² − 1`, checked against the relative tolerance.
    pub fn x_margin(&self) -> Result<f64> {
        margin(self.d040, self.d030, "x", "d_040 - d_030^2 - 1")
    }

    /// `δ_004 − δ_003² − 1`, checked against the relative tolerance.
    pub fn z_margin(&self) -> Result<f64> {
        margin(self.d004, self.d003, "z", "d_004 - d_003^2 - 1")
    }

    pub fn optimum(&self) -> Result<OptimumConstants> {
        let abdf = self.abdf()?;
        let kx = self.x_margin()?;
        let kz = self.z_margin()?;
        let (cx, cz) = (self.cx, self.cz);
        for (name, c) in [("C_x", cx), ("C_z", cz)] {
            if !c.is_finite() || c == 0.0 {
                return Err(Error::SingularDenominator(format!("{name} = {c}")));
            }
        }
        let Abdf { a, b, d, f } = abdf;
        let den_x = 2.0 * cx * cx * kx;
        let den_z = 2.0 * cz * cz * kz;
        Ok(OptimumConstants {
            abdf,
            alpha: (a * (self.d040 - 1.0) - b * self.d030 * cx) / den_x,
            beta: (b * cx * cx - a * self.d030 * cx) / den_x,
            // The printed denominator for γ carries δ_030²; the z-block uses δ_003².
            gamma: (d * (self.d004 - 1.0) - f * self.d003 * cz) / den_z,
            delta: (cz * cz * f - d * self.d003 * cz) / den_z,
        })
    }
}

fn margin(d4: f64, d3: f64, var: &str, label: &str) -> Result<f64> {
    let k = d4 - d3 * d3 - 1.0;
    if k > SINGULAR_REL_TOL * d4.abs().max(1.0) {
        Ok(k)
    } else {
        Err(Error::SingularDenominator(format!("{var}: {label} = {k}")))
    }
}

/// Plug-in estimates `(Â, B̂, D̂, F̂, α̂, β̂, γ̂, δ̂)` from the second-phase
/// moment table, `Ĉ_x`, `Ĉ_z` and `r`.
pub fn estimated_optimum_constants(stats: &SampleStatistics) -> Result<OptimumConstants> {
    ConstantInputs::gather(&stats.delta, stats.cx_hat, stats.cz_hat, stats.r)?.optimum()
}

/// `TLinear` with the population-optimum constants.
pub fn make_optimal_spec(moments: &MomentSet) -> Result<EstimatorSpec> {
    let c = ConstantInputs::from_moments(moments)?.optimum()?;
    Ok(EstimatorSpec::TLinear(c.as_array()))
}

/// `HLinear` with the population-optimum `(α, β)`; the best estimator that
/// ignores `z`.
pub fn make_optimal_h_spec(moments: &MomentSet) -> Result<EstimatorSpec> {
    let c = ConstantInputs::from_moments(moments)?.optimum()?;
    Ok(EstimatorSpec::HLinear([c.alpha, c.beta]))
}

/// `DifferenceType` with constants `ρ_yx (α, β, γ, δ)`, which reach the same
/// first-order variance as the optimum `TLinear`.
pub fn make_optimal_difference_spec(moments: &MomentSet) -> Result<EstimatorSpec> {
    let c = ConstantInputs::from_moments(moments)?.optimum()?;
    let rho = moments.rho()?;
    Ok(EstimatorSpec::DifferenceType(c.as_array().map(|k| rho * k)))
}

fn require_positive(ratios: &[(&'static str, f64)]) -> Result<()> {
    for &(name, value) in ratios {
        if !(value > 0.0) {
            return Err(Error::NonPositiveRatio { name, value });
        }
    }
    Ok(())
}

fn linear_bracket(c: &[f64; 4], s: &SampleStatistics) -> f64 {
    1.0 + c[0] * (s.u - 1.0) + c[1] * (s.v - 1.0) + c[2] * (s.w - 1.0) + c[3] * (s.a - 1.0)
}

fn checked_denominator(den: f64, what: &str) -> Result<f64> {
    if den > SINGULAR_REL_TOL {
        Ok(den)
    } else {
        Err(Error::SingularDenominator(format!(
            "{what} denominator = {den}"
        )))
    }
}

/// Evaluates one estimator on one sample.
pub fn estimate(spec: &EstimatorSpec, stats: &SampleStatistics) -> Result<f64> {
    let s = stats;
    let r = s.r;
    let all_ratios = [("u", s.u), ("v", s.v), ("w", s.w), ("a", s.a)];
    match spec {
        EstimatorSpec::SampleR => Ok(r),
        EstimatorSpec::ChainRatio => {
            require_positive(&all_ratios)?;
            Ok(r * (s.mean_x_first / s.mean_x)
                * (s.aux.mean_z / s.mean_z_first)
                * (s.s2_x_first / s.s2_x)
                * (s.aux.var_z / s.s2_z_first))
        }
        EstimatorSpec::GeneralizedPower(c) => {
            require_positive(&all_ratios)?;
            Ok(r * (s.mean_x / s.mean_x_first).powf(c[0])
                * (s.s2_x / s.s2_x_first).powf(c[1])
                * (s.mean_z_first / s.aux.mean_z).powf(c[2])
                * (s.s2_z_first / s.aux.var_z).powf(c[3]))
        }
        EstimatorSpec::HLinear(c) => Ok(r * (1.0 + c[0] * (s.u - 1.0) + c[1] * (s.v - 1.0))),
        EstimatorSpec::HPower(c) => {
            require_positive(&all_ratios[..2])?;
            Ok(r * s.u.powf(c[0]) * s.v.powf(c[1]))
        }
        EstimatorSpec::TLinear(c) => Ok(r * linear_bracket(c, s)),
        EstimatorSpec::TPower(c) => {
            require_positive(&all_ratios)?;
            Ok(r * s.u.powf(c[0]) * s.v.powf(c[1]) * s.w.powf(c[2]) * s.a.powf(c[3]))
        }
        EstimatorSpec::DifferenceType(c) => Ok(r
            + c[0] * (s.u - 1.0)
            + c[1] * (s.v - 1.0)
            + c[2] * (s.w - 1.0)
            + c[3] * (s.a - 1.0)),
        EstimatorSpec::TdStar(form) => {
            let k = estimated_optimum_constants(s)?;
            let (al, be, ga, de) = (k.alpha, k.beta, k.gamma, k.delta);
            match form {
                TdStarForm::Product => {
                    require_positive(&all_ratios)?;
                    Ok(r * s.u.powf(al) * s.v.powf(be) * s.w.powf(ga) * s.a.powf(de))
                }
                TdStarForm::Ratio => {
                    let num = 1.0 + al * (s.u - 1.0) + ga * (s.w - 1.0);
                    let den = 1.0 - be * (s.v - 1.0) - de * (s.a - 1.0);
                    Ok(r * num / checked_denominator(den, "td-star:ratio")?)
                }
                TdStarForm::Linear => Ok(r * linear_bracket(&k.as_array(), s)),
                TdStarForm::Inverse => {
                    let den = 1.0
                        - al * (s.u - 1.0)
                        - be * (s.v - 1.0)
                        - ga * (s.w - 1.0)
                        - de * (s.a - 1.0);
                    Ok(r / checked_denominator(den, "td-star:inverse")?)
                }
            }
        }
    }
}
