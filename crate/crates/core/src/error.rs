use thiserror::Error;

/// Errors produced while building or evaluating curve inverses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),

    #[error("{field}: {message}")]
    Validation { field: String, message: String },

    #[error("parameter {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: String, lo: String, hi: String },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("knot interval {0} has zero length")]
    InactiveInterval(usize),

    #[error("expected degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("control points {first}..={last} are collinear")]
    CollinearTriple { first: usize, last: usize },

    #[error("segment on knot interval {interval} is not general: {reason}")]
    NonGeneralSegment { interval: usize, reason: String },

    #[error("point is not on the curve")]
    PointNotOnCurve,

    #[error("multiplicities do not match the reduced knot vector: {0}")]
    MultiplicityMismatch(String),

    #[error("could not parse number {0:?}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
