use thiserror::Error;

pub type Result<T> = std::result::Result<T, GatherError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GatherError {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite coordinate for agent {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("no directions: every target coincides with the apex")]
    NoDirections,

    #[error("geometric precondition violated: {0}")]
    Geometry(String),

    #[error("integration blow-up: {0}")]
    Blowup(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl GatherError {
    pub fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        GatherError::InvalidParam {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for GatherError {
    fn from(e: std::io::Error) -> Self {
        GatherError::Io(e.to_string())
    }
}

impl From<csv::Error> for GatherError {
    fn from(e: csv::Error) -> Self {
        GatherError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for GatherError {
    fn from(e: serde_json::Error) -> Self {
        GatherError::Config(e.to_string())
    }
}
