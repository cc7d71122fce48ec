use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid population frame: {0}")]
    InvalidFrame(String),

    #[error("variable `{0}` has zero variance")]
    DegenerateVariable(&'static str),

    #[error("coefficient of variation of `{0}` is undefined: mean is zero")]
    ZeroMean(&'static str),

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("ratio `{name}` = {value} is not positive; power-form estimator undefined")]
    NonPositiveRatio { name: &'static str, value: f64 },

    #[error("singular denominator: {0}")]
    SingularDenominator(String),

    #[error("correlation is zero (|r| = {0:e}); constants dividing by it are undefined")]
    ZeroCorrelation(f64),

    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),

    #[error("design has {count} two-phase samples, exceeding the enumeration cap of {cap}")]
    TooManySamples { count: u128, cap: u128 },

    #[error("all {0} replications were degenerate")]
    AllSamplesDegenerate(usize),

    #[error("{skipped} of {total} replications were skipped (limit is 1%)")]
    ExcessiveSkips { skipped: usize, total: usize },

    #[error("cannot parse estimator `{0}`")]
    ParseEstimator(String),
}

impl Error {
    /// True for errors caused by bad input (files, parameters, designs), as
    /// opposed to failures that surface while computing on valid input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidFrame(_)
                | Error::DegenerateVariable(_)
                | Error::ZeroMean(_)
                | Error::MissingParameter(_)
                | Error::InvalidParameter(_)
                | Error::InvalidDesign(_)
                | Error::ParseEstimator(_)
        )
    }
}
