use thiserror::Error;

/// Errors raised by the factorizations and mechanisms in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("horizon must be at least {min}, got {got}")]
    InvalidHorizon { min: usize, got: usize },

    #[error("invalid privacy budget: {0}")]
    InvalidBudget(String),

    #[error(
        "epsilon = {epsilon} is outside the supported regime (epsilon < 1); \
         larger budgets need the analytic Gaussian calibration of Balle and Wang, which is not provided"
    )]
    UnsupportedRegime { epsilon: f64 },

    #[error("dense materialization of dimension {dim} exceeds the limit {limit}")]
    DenseLimit { dim: usize, limit: usize },

    #[error(
        "numerical failure in averaging factor at ({row}, {col}): entry {value:e} is negative"
    )]
    NumericalFailure { row: usize, col: usize, value: f64 },

    #[error("step {step} exceeds the declared horizon {horizon}")]
    HorizonExceeded { step: usize, horizon: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("update would make the count of coordinate {coord} negative ({value})")]
    NegativeCount { coord: usize, value: f64 },

    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),

    #[error("query dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("vertex sets must be nonempty and disjoint")]
    InvalidCut,

    #[error("difference provider {0:?} does not declare its sensitivity")]
    UndeclaredSensitivity(String),

    #[error("grid mismatch: expected {expected} intervals, got {got}")]
    GridMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
