use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("unknown space: {0}")]
    UnknownSpace(String),
    #[error("metric has a non-positive coordinate at index {0}")]
    NonPositiveMetric(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cleared flow field is not polynomial: {0}")]
    NonPolynomialResult(String),
    #[error("no printed system for {0}")]
    NotTranscribed(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("point is outside chart {0}")]
    ChartDomain(String),
    #[error("jacobian estimates disagree (relative gap {0:.3e})")]
    IllConditioned(f64),
    #[error("certificate constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("step size underflow at t = {0}")]
    StepFailure(f64),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("decode error: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
