use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different fields: Q(sqrt {0}) and Q(sqrt {1})")]
    FieldMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a positive squarefree integer")]
    NotSquarefree(u64),
    #[error("matrix has determinant {0}, expected 1")]
    Determinant(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("letter refers to generator {index} but only {len} are available")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("iteration cap of {0} reached")]
    IterationCap(u64),
    #[error("coset enumeration exceeded {0} cosets")]
    CosetCap(usize),
    #[error("no admissible prime found up to {0}")]
    NoAdmissiblePrime(u64),
    #[error("entry is not integral at the prime {0}")]
    NotIntegral(u64),
    #[error("invalid bound parameters: {0}")]
    InvalidBoundParameters(String),
    #[error("certificate check failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
