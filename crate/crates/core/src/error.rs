//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("feature kinds differ")]
    KindMismatch,

    #[error("{measure} is not defined for {kind} features")]
    IncompatibleMeasure {
        measure: &'static str,
        kind: &'static str,
    },

    #[error("count histogram has zero total mass")]
    ZeroMassHistogram,

    #[error("zero-norm vector under cosine distance")]
    ZeroNormVector,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),

    #[error("optimization failed: {0}")]
    Convergence(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid document: {0}")]
    Document(String),
}
