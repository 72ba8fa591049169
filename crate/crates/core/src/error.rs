use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("label out of range: {0}")]
    Bounds(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("polytope is empty")]
    Empty,

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("register dimension {register} is smaller than outcome count {outcomes}")]
    RegisterTooSmall { register: usize, outcomes: usize },

    #[error("scale guard: {0}")]
    ScaleGuard(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn shape(expected: usize, actual: usize) -> Self {
        Error::Shape { expected, actual }
    }
}
