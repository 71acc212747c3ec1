use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, got {actual}")]
    Size { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A cascaded path delay falls outside `[0, T)`.
    #[error("path delay {delay:e} s outside [0, T) with T = {symbol_time:e} s")]
    Domain { delay: f64, symbol_time: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
