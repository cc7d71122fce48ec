//! Command-line front end for `twophase-core`.
//!
//! Every command prints one JSON document with sorted keys, numbers rounded
//! to 12 significant digits and a `schema` version field. Exit status is 0 on
//! success, 1 for invalid input and 2 for failures while computing.

mod input;
mod output;

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;
use twophase_core::montecarlo::DEFAULT_ENUMERATION_CAP;
use twophase_core::{
    draw_two_phase, efficiency_report, enumerate_exact, estimate, make_optimal_difference_spec,
    make_optimal_h_spec, make_optimal_spec, moments_from_params, population_moments,
    sample_statistics, simulate_many, DesignSpec, EstimatorSpec, KnownAux, MomentSet,
    ParamDocument, PopulationFrame, SimulationOptions,
};

pub use input::{load_params_json, load_population_csv};
pub use output::{render, round_sig, SCHEMA_VERSION, SIGNIFICANT_DIGITS};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },

    #[error("{path}, line {line}: {message}")]
    Csv {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{path}: expected header `y,x,z`, found `{found}`")]
    HeaderMismatch { path: String, found: String },

    #[error("{path}: invalid parameter document: {message}")]
    Json { path: String, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("cannot write `{path}`: {message}")]
    Write { path: String, message: String },

    #[error(transparent)]
    Core(#[from] twophase_core::Error),
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_validation() => 2,
            CliError::Write { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "twophase",
    version,
    about = "Correlation estimation under two-phase sampling"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Population moments and the standardized moment table.
    Moments(MomentsArgs),
    /// Analytic variances, optimum constants and PREs.
    Efficiency(EfficiencyArgs),
    /// One seeded two-phase draw with every estimator evaluated on it.
    Estimate(EstimateArgs),
    /// Seeded Monte Carlo study of one or more estimators.
    Simulate(SimulateArgs),
    /// Exact mean and MSE over every two-phase sample.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Population CSV with header `y,x,z`.
    #[arg(conflicts_with = "params", required_unless_present = "params")]
    pub pop: Option<PathBuf>,
    /// Parameter document (flat JSON).
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Use the listed `d_300` wherever `d_310` is required.
    #[arg(long)]
    pub delta310_from_delta300: bool,
}

#[derive(Debug, Args)]
pub struct EfficiencyArgs {
    #[arg(long, conflicts_with = "params", required_unless_present = "params")]
    pub pop: Option<PathBuf>,
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Second-phase sample size.
    #[arg(long)]
    pub n: usize,
    /// First-phase sample size.
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub delta310_from_delta300: bool,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Population CSV with header `y,x,z`.
    #[arg(long)]
    pub pop: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub n1: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Extra estimators to evaluate besides the default set.
    #[arg(long = "estimator")]
    pub estimators: Vec<String>,
    /// Clamp reported estimates to [-1, 1].
    #[arg(long)]
    pub clamp: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Estimator text form; repeat for several. `t-linear:optimal`,
    /// `h-linear:optimal` and `difference:optimal` take the population optimum.
    #[arg(long = "estimator", required = true)]
    pub estimators: Vec<String>,
    #[arg(long)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long = "estimator", required = true)]
    pub estimators: Vec<String>,
    /// Largest number of two-phase samples to visit.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP as u64)]
    pub cap: u64,
}

const DEFAULT_ESTIMATES: &[&str] = &[
    "sample-r",
    "chain-ratio",
    "h-linear:optimal",
    "t-linear:optimal",
    "difference:optimal",
    "td-star:product",
    "td-star:ratio",
    "td-star:linear",
    "td-star:inverse",
];

/// An estimator as named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorArg {
    Fixed(EstimatorSpec),
    OptimalT,
    OptimalH,
    OptimalDifference,
}

impl FromStr for EstimatorArg {
    type Err = twophase_core::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "t-linear:optimal" => Ok(EstimatorArg::OptimalT),
            "h-linear:optimal" => Ok(EstimatorArg::OptimalH),
            "difference:optimal" => Ok(EstimatorArg::OptimalDifference),
            other => other.parse().map(EstimatorArg::Fixed),
        }
    }
}

impl EstimatorArg {
    /// Concrete spec, taking optimal constants from `moments`.
    pub fn resolve(&self, moments: &MomentSet) -> twophase_core::Result<EstimatorSpec> {
        match self {
            EstimatorArg::Fixed(spec) => Ok(*spec),
            EstimatorArg::OptimalT => make_optimal_spec(moments),
            EstimatorArg::OptimalH => make_optimal_h_spec(moments),
            EstimatorArg::OptimalDifference => make_optimal_difference_spec(moments),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn load_moments(
    pop: Option<&Path>,
    params: Option<&Path>,
    delta310: bool,
) -> Result<MomentSet, CliError> {
    let mut m = match (pop, params) {
        (Some(p), _) => population_moments(&load_population_csv(p)?)?,
        (None, Some(p)) => moments_from_params(&load_params_json(p)?)?,
        (None, None) => {
            return Err(CliError::Usage(
                "a population CSV or --params is required".into(),
            ))
        }
    };
    if delta310 {
        m.apply_delta310_from_delta300();
    }
    Ok(m)
}

fn load_design(args: &DesignArgs) -> Result<(PopulationFrame, DesignSpec), CliError> {
    let frame = load_population_csv(&args.pop)?;
    let design = DesignSpec::new(frame.len(), args.n1, args.n)?;
    Ok((frame, design))
}

fn resolve_all(names: &[String], moments: &MomentSet) -> Result<Vec<EstimatorSpec>, CliError> {
    names
        .iter()
        .map(|s| Ok(s.parse::<EstimatorArg>()?.resolve(moments)?))
        .collect()
}

fn moments_payload(args: &MomentsArgs) -> Result<Map<String, Value>, CliError> {
    let m = load_moments(
        args.pop.as_deref(),
        args.params.as_deref(),
        args.delta310_from_delta300,
    )?;
    let mut out = Map::new();
    out.insert("moments".into(), to_value(&ParamDocument::from_moments(&m)));
    out.insert("notes".into(), to_value(&m.notes));
    Ok(out)
}

fn efficiency_payload(args: &EfficiencyArgs) -> Result<Map<String, Value>, CliError> {
    let m = load_moments(
        args.pop.as_deref(),
        args.params.as_deref(),
        args.delta310_from_delta300,
    )?;
    let report = efficiency_report(&m, args.n, args.n1)?;
    let mut out = Map::new();
    out.insert("report".into(), to_value(&report));
    Ok(out)
}

fn estimate_payload(args: &EstimateArgs) -> Result<Map<String, Value>, CliError> {
    let (frame, design) = load_design(&args.design)?;
    let moments = population_moments(&frame)?;
    let sample = draw_two_phase(&design, args.seed)?;
    let stats = sample_statistics(&frame, &sample, &KnownAux::from_frame(&frame)?)?;

    let mut estimates = Map::new();
    let names = DEFAULT_ESTIMATES
        .iter()
        .map(|s| s.to_string())
        .chain(args.estimators.iter().cloned());
    for name in names {
        let arg: EstimatorArg = name.parse()?;
        let mut entry = Map::new();
        let outcome = arg.resolve(&moments).and_then(|spec| {
            entry.insert("spec".into(), Value::from(spec.to_string()));
            estimate(&spec, &stats)
        });
        match outcome {
            Ok(v) => {
                let shown = if args.clamp { v.clamp(-1.0, 1.0) } else { v };
                entry.insert("value".into(), Value::from(shown));
                if shown != v {
                    entry.insert("unclamped".into(), Value::from(v));
                }
            }
            Err(e) => {
                entry.insert("error".into(), Value::from(e.to_string()));
            }
        }
        estimates.insert(name, Value::Object(entry));
    }

    let mut statistics = Map::new();
    for (k, v) in [
        ("r", stats.r),
        ("u", stats.u),
        ("v", stats.v),
        ("w", stats.w),
        ("a", stats.a),
        ("mean_y", stats.mean_y),
        ("mean_x", stats.mean_x),
        ("mean_z", stats.mean_z),
        ("mean_x_first", stats.mean_x_first),
        ("mean_z_first", stats.mean_z_first),
        ("s2_y", stats.s2_y),
        ("s2_x", stats.s2_x),
        ("s2_z", stats.s2_z),
        ("s2_x_first", stats.s2_x_first),
        ("s2_z_first", stats.s2_z_first),
        ("C_x_hat", stats.cx_hat),
        ("C_z_hat", stats.cz_hat),
    ] {
        statistics.insert(k.into(), Value::from(v));
    }

    let mut out = Map::new();
    out.insert("design".into(), to_value(&design));
    out.insert("seed".into(), Value::from(args.seed));
    out.insert("clamp".into(), Value::from(args.clamp));
    out.insert("sample".into(), to_value(&sample));
    out.insert("statistics".into(), Value::Object(statistics));
    out.insert("rho_yx".into(), Value::from(moments.rho()?));
    out.insert("estimates".into(), Value::Object(estimates));
    Ok(out)
}

fn simulate_payload(args: &SimulateArgs) -> Result<Map<String, Value>, CliError> {
    let (frame, design) = load_design(&args.design)?;
    let specs = resolve_all(&args.estimators, &population_moments(&frame)?)?;
    let mut options = SimulationOptions::new(args.reps, args.seed);
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        options = options.with_workers(w);
    }
    let results = simulate_many(&frame, &design, &specs, &options)?;
    let mut out = Map::new();
    out.insert("results".into(), to_value(&results));
    Ok(out)
}

fn enumerate_payload(args: &EnumerateArgs) -> Result<Map<String, Value>, CliError> {
    let (frame, design) = load_design(&args.design)?;
    let specs = resolve_all(&args.estimators, &population_moments(&frame)?)?;
    let results = specs
        .iter()
        .map(|spec| enumerate_exact(&frame, &design, spec, u128::from(args.cap)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Map::new();
    out.insert("results".into(), to_value(&results));
    Ok(out)
}

/// Runs one command and returns the rendered JSON report.
pub fn run(config: &RunConfig) -> Result<String, CliError> {
    let (name, payload) = match &config.command {
        Command::Moments(a) => ("moments", moments_payload(a)?),
        Command::Efficiency(a) => ("efficiency", efficiency_payload(a)?),
        Command::Estimate(a) => ("estimate", estimate_payload(a)?),
        Command::Simulate(a) => ("simulate", simulate_payload(a)?),
        Command::Enumerate(a) => ("enumerate", enumerate_payload(a)?),
    };
    Ok(render(name, payload))
}

/// Runs one command, writes its report and returns the exit status.
pub fn run_and_write(config: &RunConfig) -> i32 {
    let result = run(config).and_then(|text| match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Write {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
