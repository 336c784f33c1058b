use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum PhiError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("non-integrable pairing: {0}")]
    NonIntegrable(String),
    #[error("missing geometry constants: {0}")]
    MissingConstants(String),
    #[error("weight condition violated: {0}")]
    WeightGate(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("numerical failure: {0}")]
    Numerics(String),
    #[error("{origin}:{line}:{column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, PhiError>;
