//! Error type shared by all core modules.

use thiserror::Error;

/// Errors produced by grid, simulation, measurement, ingestion, and metric
/// operations.
#[derive(Error, Debug)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A coordinate fell outside the analysis domain.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// An input file does not match its documented schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A field could not be parsed; carries the 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A prediction contained no burned pixels to summarize.
    #[error("no fire: {0}")]
    NoFire(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
