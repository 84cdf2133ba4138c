use thiserror::Error;

/// Crate-wide error type.
///
/// The CLI maps variants to process exit codes: input errors exit 1,
/// resource errors exit 2, network errors exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input data or parameters (bad coordinates, exhausted trimming,
    /// dimension mismatches, malformed files).
    #[error("input error: {0}")]
    Input(String),

    /// A computation would exceed a configured resource budget.
    #[error("resource error: {0}")]
    Resource(String),

    /// A network operation failed and may be retried.
    #[error("network error: {0}")]
    Network(String),

    /// Malformed content at a known line of a parsed file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn network(msg: impl Into<String>) -> Self {
        Error::Network(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
