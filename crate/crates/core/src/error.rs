use std::path::PathBuf;

use crate::grid::GridSpec;

/// Errors raised anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: workspace is {expected}, field is {found}")]
    GridMismatch { expected: GridSpec, found: GridSpec },

    #[error("field has {found} values but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite field value at node {0}")]
    NonFiniteValue(usize),

    #[error("field has zero mass")]
    ZeroMass,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no negative Gaussian energy found for c up to {ceiling}")]
    NotFound { ceiling: f64 },

    #[error("state became non-finite during a step of size {h}")]
    NonFinite { h: f64 },

    #[error("step size underflow: {rejections} consecutive rejections at h = {h}")]
    StepUnderflow { h: f64, rejections: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("bracket failure at p = {p}: c = {c} is already a minimizer, threshold lies below the scan floor")]
    BracketFailure { p: f64, c: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
