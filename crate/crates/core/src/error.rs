use thiserror::Error;

/// Errors produced by the election library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("{0}")]
    Domain(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid ballot: {0}")]
    InvalidBallot(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    /// An internal construction step failed. This signals a bug, not bad input.
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("search budget exhausted: {0}")]
    Budget(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
