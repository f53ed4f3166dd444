use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("point {index} has a non-finite coordinate")]
    NonFinitePoint { index: usize },

    #[error("invalid kernel configuration: {0}")]
    InvalidKernel(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("edge field storage does not match the weight matrix sparsity pattern")]
    PatternMismatch,

    #[error("non-positive degree {value} at vertex {index}")]
    NonPositiveDegree { index: usize, value: f64 },

    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    #[error("vertex index {index} out of range for graph of size {n}")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("unknown manifold '{id}' (valid: {valid})")]
    UnknownManifold { id: String, valid: String },

    #[error("unknown function '{id}' for manifold '{manifold}' (valid: {valid})")]
    UnknownFunction {
        id: String,
        manifold: String,
        valid: String,
    },

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error("rate fit: {0}")]
    RateFit(String),

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
