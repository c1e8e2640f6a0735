use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("instance too large: {n}^{d} tuples exceeds the budget of {budget}")]
    BudgetExceeded { n: usize, d: usize, budget: u64 },

    #[error("invalid exponent p = {0} (need p > 1)")]
    InvalidExponent(f64),

    #[error("ground truth has a zero entry at index {0}")]
    ZeroTruthEntry(usize),

    #[error("point is outside the region where every ratio product is at most one")]
    OutsideRegion,

    #[error("the zero vector has no staircase (no jump points)")]
    ZeroPoint,

    #[error("point is not Clarke-stationary (worst interval misses 0 by {0:e})")]
    NotStationary(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no grid point lies inside the domain mask")]
    EmptyDomain,

    #[error("argument outside the function's domain: {0}")]
    OutOfDomain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
