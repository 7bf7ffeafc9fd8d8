use std::io;

use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// A history line could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input parsed but violates a structural rule (duplicate build, empty history, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Incompatible parameters, e.g. mixing matrices and deltas built with different `d` modes.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was called outside its domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Precision over an empty selection or recall over an empty predictable set.
    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Validation and usage errors map to 2, runtime and I/O failures to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Json(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
