//! Estimation of a finite-population correlation coefficient `ρ_yx` under
//! two-phase (double) sampling, using a first auxiliary `x` observed on the
//! first-phase sample and a second auxiliary `z` whose population mean and
//! variance are known.
//!
//! The crate is organised bottom-up:
//!
//! * [`moments`]: population frames, exact moments and the standardized
//!   mixed-moment table `δ_pqm`, published-parameter ingestion;
//! * [`sampling`]: two-phase SRSWOR draws and sample statistics;
//! * [`estimators`]: every point estimator of `ρ_yx` (chain ratio, power and
//!   linear class members, plug-in optimum estimators, difference type);
//! * [`analytics`]: first-order variances, optimum constants, PREs;
//! * [`montecarlo`]: exact enumeration and seeded Monte Carlo checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod estimators;
pub mod moments;
pub mod montecarlo;
pub mod published;
pub mod sampling;
mod sum;

pub use analytics::{
    constants_abdf, efficiency_report, min_var_hd, min_var_td, optimum_constants, pre, var_h_class,
    var_r, var_t_class, variance_gap, Abdf, VarianceReport,
};
pub use error::{Error, Result};
pub use estimators::{
    estimate, estimated_optimum_constants, make_optimal_difference_spec, make_optimal_h_spec,
    make_optimal_spec, EstimatorSpec, OptimumConstants, TdStarForm,
};
pub use moments::{
    moments_from_params, normal_theory_moments, population_moments, trivariate_normal_moments,
    DeltaTable, MomentIndex, MomentSet, ParamDocument, PopulationFrame,
};
pub use montecarlo::{
    enumerate_exact, simulate, simulate_many, EnumerationResult, SimulationOptions,
    SimulationResult,
};
pub use sampling::{
    draw_two_phase, sample_statistics, DesignSpec, KnownAux, SampleStatistics, TwoPhaseSample,
};
