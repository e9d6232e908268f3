use thiserror::Error;

/// Errors raised by the arithmetic engines and decision procedures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element is not a unit")]
    NonUnit,
    #[error("unit is not a square")]
    NotASquare,
    #[error("insufficient precision: need {needed}, have {available}")]
    InsufficientPrecision { needed: u32, available: u32 },
    #[error("value is indeterminate at the working precision")]
    IndeterminateAtPrecision,
    #[error("filtration depth {given} is too small, need at least {needed}")]
    DepthTooSmall { needed: u32, given: u32 },
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    #[error("action is not of the stated order: {0}")]
    BadAction(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("precision too low: {0}")]
    PrecisionTooLow(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
