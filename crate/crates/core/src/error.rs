use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the range where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("kernel singularity: {0}")]
    Singular(String),

    /// The sequential sampler met a Schur residual that is negative beyond
    /// roundoff, even after refactoring the Gram matrix.
    #[error("numerical degeneracy at sampling step {step}: residual {residual:e}")]
    Degenerate { step: usize, residual: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown statistic `{0}`")]
    UnknownStatistic(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
