use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "header mismatch: expected column `{expected}` at position {position}, found `{found}`"
    )]
    MissingColumn {
        position: usize,
        expected: String,
        found: String,
    },

    #[error("parse error at row {row}, column `{column}`: {message}")]
    ParseError {
        row: usize,
        column: String,
        message: String,
    },

    #[error("dataset has no data rows")]
    EmptyDataset,

    #[error("row {row}: {message}")]
    InvariantViolation { row: usize, message: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate column `{0}` (zero variance)")]
    DegenerateColumn(String),

    #[error("target has zero variance, R² undefined")]
    DegenerateTarget,

    #[error("insufficient samples: n = {n}, k = {k} (need n > k + 1)")]
    InsufficientSamples { n: usize, k: usize },

    #[error("singular design matrix (condition estimate {condition:e})")]
    SingularDesign { condition: f64 },

    #[error("degenerate leaf: hessian sum + lambda = {0} <= 0")]
    DegenerateLeaf(f64),

    #[error("missing feature `{0}` in input row")]
    MissingFeature(String),

    #[error("no traffic samples in the configured window")]
    NoSamples,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
