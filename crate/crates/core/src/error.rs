use thiserror::Error;

/// Errors produced by grid construction, functionals and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate function: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at dof {0}")]
    NonFinite(usize),

    #[error("mass mismatch: expected {expected}, got {got}")]
    MassMismatch { expected: f64, got: f64 },

    #[error("bisection bracket [{lo}, {hi}] does not straddle the energy sign change")]
    BadBracket { lo: f64, hi: f64 },

    #[error("malformed function dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
