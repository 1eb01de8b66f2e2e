use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {left} nodes on length {left_len} vs {right} nodes on length {right_len}")]
    GridMismatch {
        left: usize,
        left_len: f64,
        right: usize,
        right_len: f64,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{what} is undefined for nonpositive argument {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("field is not strictly positive: node {node} has value {value}")]
    NonPositive { node: usize, value: f64 },
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("linear solver failure: {0}")]
    Solver(String),
    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
