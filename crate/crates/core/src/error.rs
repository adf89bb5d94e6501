use thiserror::Error;

/// Errors produced while building surfaces, curves and plots.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("confusion matrix has no {0} instances; both classes need at least one")]
    DegenerateClass(&'static str),

    #[error("rates must lie in [0, 1], got tpr={tpr}, tnr={tnr}")]
    InvalidRate { tpr: f64, tnr: f64 },

    #[error("imbalance ratio must be a finite positive number, got {0}")]
    InvalidRatio(f64),

    #[error("grid resolution must be at least 2, got {0}")]
    InvalidResolution(usize),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("beta must be a finite positive number, got {0}")]
    InvalidBeta(f64),

    #[error("surfaces differ in {0}")]
    Mismatch(&'static str),

    #[error("invalid ratio schedule: {0}")]
    InvalidSchedule(String),

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("need at least 3 distinct ratios >= 1 for a growth check, got {0}")]
    InsufficientSamples(usize),

    #[error("no contour levels given")]
    EmptyLevels,

    #[error("invalid render spec: {0}")]
    InvalidRenderSpec(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
