use thiserror::Error;

/// Errors raised across the library. The CLI maps the variants onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HydraError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid branch {index}: {reason}")]
    Validation { index: usize, reason: String },

    #[error("invalid map: {0}")]
    Malformed(String),

    #[error("unknown catalog entry: {0}")]
    Lookup(String),

    #[error("unsupported for this map: {0}")]
    Capability(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource guard tripped: {0}")]
    Resource(String),

    #[error("tail bound {achieved:e} exceeds tolerance {requested:e}")]
    Tolerance { achieved: f64, requested: f64 },

    #[error("evaluation point is a pole: {0}")]
    Pole(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for HydraError {
    fn from(err: std::io::Error) -> Self {
        HydraError::Io(err.to_string())
    }
}

impl From<serde_json::Error> for HydraError {
    fn from(err: serde_json::Error) -> Self {
        HydraError::Parse(err.to_string())
    }
}

pub type Result<T, E = HydraError> = std::result::Result<T, E>;
