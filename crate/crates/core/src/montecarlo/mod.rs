//! Empirical checks of the first-order theory: brute-force enumeration of
//! every two-phase sample on tiny populations, and seeded Monte Carlo on
//! larger ones.
//!
//! Replication `i` of a run with seed `s` draws from a ChaCha8 generator
//! seeded with `s` on stream `i`, so results do not depend on how the
//! replications are scheduled across threads. Aggregation walks the
//! per-replication values in index order with compensated summation.

pub mod synthetic;

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{min_var_td, var_h_class, var_r, var_t_class};
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorSpec};
use crate::moments::{population_moments, MomentSet, PopulationFrame};
use crate::sampling::{
    draw_two_phase_with, sample_statistics, DesignSpec, KnownAux, TwoPhaseSample,
};
use crate::sum::{compensated_sum, CompensatedSum};

/// Runs fail when more than this fraction of replications is skipped.
pub const MAX_SKIP_FRACTION: f64 = 0.01;
pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationOptions {
    pub reps: usize,
    pub seed: u64,
    /// Worker threads; `None` uses rayon's global pool.
    pub workers: Option<usize>,
}

impl SimulationOptions {
    pub fn new(reps: usize, seed: u64) -> Self {
        SimulationOptions {
            reps,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub estimator: EstimatorSpec,
    pub design: DesignSpec,
    pub seed: u64,
    pub reps_requested: usize,
    pub reps_used: usize,
    pub reps_skipped: usize,
    pub skip_reasons: BTreeMap<String, usize>,
    /// Population value the errors are measured against.
    pub rho_yx: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub empirical_variance: f64,
    pub empirical_mse: f64,
    pub mc_standard_error_of_mean: f64,
    pub mc_standard_error_of_mse: f64,
    /// First-order variance at the population moments, when the estimator
    /// has one and the moments allow it.
    pub analytic_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerationResult {
    pub estimator: EstimatorSpec,
    pub design: DesignSpec,
    pub pairs_total: u128,
    pub pairs_used: usize,
    pub pairs_skipped: usize,
    pub skip_reasons: BTreeMap<String, usize>,
    pub rho_yx: f64,
    pub mean: f64,
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
}

/// First-order variance of an estimator at the given moments.
pub fn analytic_variance(spec: &EstimatorSpec, m: &MomentSet, n: usize, n1: usize) -> Option<f64> {
    let v = match *spec {
        EstimatorSpec::SampleR => var_r(m, n),
        EstimatorSpec::ChainRatio => var_t_class(m, n, n1, [-1.0; 4]),
        EstimatorSpec::GeneralizedPower(c)
        | EstimatorSpec::TLinear(c)
        | EstimatorSpec::TPower(c) => var_t_class(m, n, n1, c),
        EstimatorSpec::HLinear(c) | EstimatorSpec::HPower(c) => var_h_class(m, n, n1, c),
        EstimatorSpec::TdStar(_) => min_var_td(m, n, n1),
        EstimatorSpec::DifferenceType(c) => m
            .rho()
            .and_then(|rho| var_t_class(m, n, n1, c.map(|k| k / rho))),
    };
    v.ok().filter(|v| v.is_finite())
}

fn skip_key(e: &Error) -> String {
    match e {
        Error::DegenerateSample(_) => "degenerate sample",
        Error::NonPositiveRatio { .. } => "non-positive ratio",
        Error::SingularDenominator(_) => "singular denominator",
        Error::ZeroCorrelation(_) => "zero correlation",
        _ => "other",
    }
    .to_string()
}

struct Tally {
    values: Vec<f64>,
    skips: BTreeMap<String, usize>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            values: Vec::new(),
            skips: BTreeMap::new(),
        }
    }

    fn push(&mut self, outcome: &std::result::Result<f64, String>) {
        match outcome {
            Ok(v) if v.is_finite() => self.values.push(*v),
            Ok(_) => *self.skips.entry("non-finite estimate".into()).or_default() += 1,
            Err(k) => *self.skips.entry(k.clone()).or_default() += 1,
        }
    }

    fn skipped(&self) -> usize {
        self.skips.values().sum()
    }

    fn check(&self, total: usize) -> Result<()> {
        let skipped = self.skipped();
        if self.values.is_empty() {
            return Err(Error::AllSamplesDegenerate(total));
        }
        if skipped as f64 > MAX_SKIP_FRACTION * total as f64 {
            return Err(Error::ExcessiveSkips { skipped, total });
        }
        Ok(())
    }
}

struct Summary {
    mean: f64,
    variance: f64,
    mse: f64,
    se_mean: f64,
    se_mse: f64,
}

/// Population (divisor `len`) summaries of the estimates and their squared
/// errors, plus Monte Carlo standard errors (divisor `len − 1`).
fn summarize(values: &[f64], target: f64) -> Summary {
    let len = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / len;
    let sq_err: Vec<f64> = values.iter().map(|v| (v - target) * (v - target)).collect();
    let mse = compensated_sum(sq_err.iter().copied()) / len;
    let mut dev = CompensatedSum::default();
    let mut dev_sq = CompensatedSum::default();
    for (v, e) in values.iter().zip(&sq_err) {
        dev.add((v - mean) * (v - mean));
        dev_sq.add((e - mse) * (e - mse));
    }
    let variance = dev.total() / len;
    let (se_mean, se_mse) = if values.len() > 1 {
        (
            (dev.total() / (len - 1.0) / len).sqrt(),
            (dev_sq.total() / (len - 1.0) / len).sqrt(),
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    Summary {
        mean,
        variance,
        mse,
        se_mean,
        se_mse,
    }
}

fn evaluate_all(
    frame: &PopulationFrame,
    sample: &TwoPhaseSample,
    aux: &KnownAux,
    specs: &[EstimatorSpec],
) -> Vec<std::result::Result<f64, String>> {
    match sample_statistics(frame, sample, aux) {
        Ok(stats) => specs
            .iter()
            .map(|s| estimate(s, &stats).map_err(|e| skip_key(&e)))
            .collect(),
        Err(e) => vec![Err(skip_key(&e)); specs.len()],
    }
}

/// Runs several estimators on the same replications.
pub fn simulate_many(
    frame: &PopulationFrame,
    design: &DesignSpec,
    specs: &[EstimatorSpec],
    options: &SimulationOptions,
) -> Result<Vec<SimulationResult>> {
    design.validate()?;
    if design.population != frame.len() {
        return Err(Error::InvalidDesign(format!(
            "design N = {} but population has {} units",
            design.population,
            frame.len()
        )));
    }
    if options.reps == 0 {
        return Err(Error::InvalidDesign("reps must be at least 1".into()));
    }
    if let Some(bad) = specs.iter().find(|s| !s.is_valid()) {
        return Err(Error::ParseEstimator(bad.to_string()));
    }
    let moments = population_moments(frame)?;
    let rho = moments.rho()?;
    let aux = KnownAux::from_frame(frame)?;

    let one = |rep: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(rep as u64);
        let sample = draw_two_phase_with(design, &mut rng).expect("design validated above");
        evaluate_all(frame, &sample, &aux, specs)
    };
    let outcomes: Vec<Vec<std::result::Result<f64, String>>> = match options.workers {
        Some(1) => (0..options.reps).map(one).collect(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidDesign(format!("cannot start {w} workers: {e}")))?
            .install(|| (0..options.reps).into_par_iter().map(one).collect()),
        None => (0..options.reps).into_par_iter().map(one).collect(),
    };

    specs
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let mut tally = Tally::new();
            for rep in &outcomes {
                tally.push(&rep[k]);
            }
            tally.check(options.reps)?;
            let s = summarize(&tally.values, rho);
            Ok(SimulationResult {
                estimator: *spec,
                design: *design,
                seed: options.seed,
                reps_requested: options.reps,
                reps_used: tally.values.len(),
                reps_skipped: tally.skipped(),
                skip_reasons: tally.skips,
                rho_yx: rho,
                mean_estimate: s.mean,
                bias: s.mean - rho,
                empirical_variance: s.variance,
                empirical_mse: s.mse,
                mc_standard_error_of_mean: s.se_mean,
                mc_standard_error_of_mse: s.se_mse,
                analytic_variance: analytic_variance(spec, &moments, design.n, design.n1),
            })
        })
        .collect()
}

/// Seeded Monte Carlo study of one estimator. `z`'s known mean and variance
/// are the frame's exact values.
pub fn simulate(
    frame: &PopulationFrame,
    design: &DesignSpec,
    spec: &EstimatorSpec,
    options: &SimulationOptions,
) -> Result<SimulationResult> {
    Ok(
        simulate_many(frame, design, std::slice::from_ref(spec), options)?
            .pop()
            .expect("one result per estimator"),
    )
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of `(s*, s)` pairs a design admits: `C(N, n1) · C(n1, n)`.
pub fn two_phase_sample_count(design: &DesignSpec) -> u128 {
    binomial(design.population, design.n1) * binomial(design.n1, design.n)
}

/// Exact mean and MSE over every equally likely two-phase sample.
pub fn enumerate_exact(
    frame: &PopulationFrame,
    design: &DesignSpec,
    spec: &EstimatorSpec,
    cap: u128,
) -> Result<EnumerationResult> {
    design.validate()?;
    if design.population != frame.len() {
        return Err(Error::InvalidDesign(format!(
            "design N = {} but population has {} units",
            design.population,
            frame.len()
        )));
    }
    let count = two_phase_sample_count(design);
    if count > cap {
        return Err(Error::TooManySamples { count, cap });
    }
    let moments = population_moments(frame)?;
    let rho = moments.rho()?;
    let aux = KnownAux::from_frame(frame)?;
    let specs = std::slice::from_ref(spec);

    let mut tally = Tally::new();
    for first in (0..design.population).combinations(design.n1) {
        for second in first.iter().copied().combinations(design.n) {
            let sample = TwoPhaseSample::new(first.clone(), second, design.population)?;
            tally.push(&evaluate_all(frame, &sample, &aux, specs)[0]);
        }
    }
    let total = usize::try_from(count).expect("count bounded by cap");
    tally.check(total)?;
    let s = summarize(&tally.values, rho);
    Ok(EnumerationResult {
        estimator: *spec,
        design: *design,
        pairs_total: count,
        pairs_used: tally.values.len(),
        pairs_skipped: tally.skipped(),
        skip_reasons: tally.skips,
        rho_yx: rho,
        mean: s.mean,
        bias: s.mean - rho,
        variance: s.variance,
        mse: s.mse,
    })
}
