use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, DsomError>;

#[derive(Debug, Error)]
pub enum DsomError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix file line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not symmetric: d({i},{k}) = {forward} but d({k},{i}) = {backward}")]
    Asymmetric {
        i: usize,
        k: usize,
        forward: f64,
        backward: f64,
    },

    #[error("matrix diagonal must be zero: d({i},{i}) = {value}")]
    NonZeroDiagonal { i: usize, value: f64 },

    #[error("dissimilarities must be nonnegative and finite: d({i},{k}) = {value}")]
    Negative { i: usize, k: usize, value: f64 },

    #[error("{models} models requested for only {observations} observations; use a smaller map")]
    TooManyModels { models: usize, observations: usize },

    #[error("epoch {epoch} outside 1..={epochs}")]
    EpochOutOfRange { epoch: usize, epochs: usize },

    #[error("exact arithmetic needs integer dissimilarities in [0, 2^32): {0}")]
    NotExact(String),

    #[error("degenerate design for cost model fit: {0}")]
    DegenerateDesign(String),

    #[error("observed values have zero variance")]
    ZeroVariance,

    #[error("training is not deterministic: repeat {repeat} differs from the warm-up run")]
    NonDeterministic { repeat: usize },

    #[error("another benchmark is already running in this process")]
    BenchmarkBusy,

    #[error("equivalence spot-check failed: {0}")]
    Divergence(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

impl DsomError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DsomError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        DsomError::InvalidArgument(msg.into())
    }
}
