use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field size {0} exceeds the supported maximum 65536")]
    TooLarge(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("alternating ensembles require odd q, got q = {0}")]
    EvenCharacteristic(u32),
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("entry distribution has empty support")]
    EmptySupport,
    #[error("codimension {0} exceeds the supported maximum 3")]
    CodimensionTooLarge(usize),
    #[error("enumeration of {0} too large")]
    TooLargeToEnumerate(String),
    #[error("chain state cap {cap} exceeded")]
    CapExceeded { cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
