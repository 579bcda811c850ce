use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    /// A construction ran to completion but its output failed verification.
    #[error("construction for (N={n}, K={k}) produced an invalid code: {reason}")]
    ConstructionFailed { n: usize, k: usize, reason: String },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid matrix entry {0:?}; expected one of \"0\", \"1\", \"-1\", \"j\", \"-j\"")]
    InvalidEntry(String),
    #[error("enumeration bound {bound:.3e} exceeds the configured budget {budget:.3e}")]
    BudgetExceeded { bound: f64, budget: f64 },
    #[error("noise covariance is numerically singular")]
    SingularCovariance,
    #[error("code has not passed verification: {0}")]
    NotVerified(String),
    #[error("infeasible modulation pairing: {0}")]
    InfeasiblePairing(String),
    #[error("unknown constellation {0:?}")]
    UnknownConstellation(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
