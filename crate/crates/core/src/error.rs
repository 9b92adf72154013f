use thiserror::Error;

/// Errors produced by `pellian-core`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is a perfect square")]
    PerfectSquare(u64),

    #[error("determinant {0} is out of range (need 2 <= d <= 2^63 - 1)")]
    DeterminantOutOfRange(u64),

    #[error("({t}, {u}) is not a solution of t^2 - {d} u^2 = 1")]
    NotASolution { t: String, d: String, u: String },

    #[error("factorization of {0} did not complete within the effort budget")]
    FactorizationIncomplete(String),

    #[error("L-value target {target:e} for d = {d} needs {needed} terms, above the cap of {cap}")]
    TargetUnreachable { d: u64, target: f64, needed: u64, cap: u64 },

    #[error("requested relative precision {0:e} is below what f64 evaluation provides")]
    PrecisionUnavailable(f64),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
