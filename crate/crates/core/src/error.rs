use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the mechanism, the harness and the data loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("user index {index} out of range 1..={num_users}")]
    IndexOutOfRange { index: usize, num_users: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("expected {expected} user series, got {actual}")]
    UserCountMismatch { expected: usize, actual: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("column `{0}` not present in header")]
    MissingColumn(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
