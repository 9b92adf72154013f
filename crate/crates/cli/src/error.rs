use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or arguments; exit code 2.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Compute(#[from] pellian_core::Error),

    #[error("cache: {0}")]
    Cache(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use pellian_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Compute(E::InvalidInput(_) | E::PerfectSquare(_) | E::DeterminantOutOfRange(_)) => 2,
            CliError::Compute(E::NotASolution { .. }) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        use pellian_core::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Cache(_) => "cache",
            CliError::Io(_) => "io",
            CliError::Compute(e) => match e {
                E::InvalidInput(_) => "invalid_input",
                E::PerfectSquare(_) => "perfect_square",
                E::DeterminantOutOfRange(_) => "determinant_out_of_range",
                E::NotASolution { .. } => "not_a_solution",
                E::FactorizationIncomplete(_) => "factorization_incomplete",
                E::TargetUnreachable { .. } => "target_unreachable",
                E::PrecisionUnavailable(_) => "precision_unavailable",
                E::Csv(_) => "csv",
                E::Json(_) => "json",
                E::Io(_) => "io",
            },
        }
    }

    /// `{"error": kind, "message": ...}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorBody {
            error: self.kind(),
            message: self.to_string(),
        })
        .unwrap_or_else(|_| r#"{"error":"internal"}"#.into())
    }
}
