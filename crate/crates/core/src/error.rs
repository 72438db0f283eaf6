use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, parameters or a config file that do not describe a valid setup.
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// The time stepper produced non-finite values.
    #[error("instability at t = {time}: {reason}")]
    Instability { time: f64, reason: String },

    /// e^{A(t)} would leave the f64 exponent range.
    #[error("scaling error: A(t) = {0} exceeds the representable range")]
    Scaling(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Iterative estimator stopped before converging. Carries the best value seen.
    #[error("estimation did not converge after {iterations} iterations (best = {best})")]
    Estimation { iterations: usize, best: f64 },

    #[error("parse error in {path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("checkpoint format error: {0}")]
    Format(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
