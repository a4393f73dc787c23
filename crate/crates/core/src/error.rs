use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("optimizer did not converge: best cost {best_cost:e} after {restarts} restarts")]
    NotConverged { best_cost: f64, restarts: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Usage-type errors map to exit code 2, everything else to 1.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Invalid(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
