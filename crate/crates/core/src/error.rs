use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected} symbols, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("cannot resolve {erased} erased data bits: parity equations have rank {rank}")]
    UnrecoverableErasures { erased: usize, rank: usize },

    #[error("erasure parity equations are inconsistent with the known bits")]
    InconsistentParity,

    #[error("{fragments} fragments exceed the brute-force ceiling of {ceiling}")]
    OracleCeiling { fragments: usize, ceiling: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
