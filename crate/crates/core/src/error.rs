use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arithmetic overflow")]
    Overflow,

    #[error("zero has no multiplicative inverse")]
    DivisionByZero,

    #[error("polynomial is not irreducible of the requested degree")]
    NotIrreducible,

    #[error("operands live in different fields")]
    FieldMismatch,

    #[error("the zero subspace is not allowed here")]
    ZeroSubspace,

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
