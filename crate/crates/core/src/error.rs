use thiserror::Error;

use crate::harmonic::MeasureSide;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field of order {q} exceeds the table limit {limit}")]
    FieldTooLarge { q: u64, limit: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension {d} is below the minimum {min}")]
    DimensionTooSmall { d: usize, min: usize },
    #[error("dimension {d} must be even")]
    OddDimension { d: usize },
    #[error("q^d = {q}^{d} exceeds the point limit {limit}")]
    Overflow { q: u64, d: usize, limit: usize },
    #[error("expected a function on the {expected:?} side, got {found:?}")]
    WrongSide {
        expected: MeasureSide,
        found: MeasureSide,
    },
    #[error("operands live on different measure sides")]
    SideMismatch,
    #[error("operands live on different spaces")]
    SpecMismatch,
    #[error("exponent {0} is not in [1, inf]")]
    BadExponent(f64),
    #[error("variety is empty")]
    EmptyVariety,
    #[error("function is nonzero at index {index}, outside the variety")]
    SupportViolation { index: usize },
    #[error("function has zero norm")]
    ZeroFunction,
    #[error("dense operator of size {rows}x{cols} exceeds the limit")]
    TooLarge { rows: usize, cols: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("value has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
