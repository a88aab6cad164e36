use thiserror::Error;

/// Errors raised by the library. The CLI maps [`Error::ResourceLimit`] to
/// exit code 2 and everything else to exit code 1.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime in 2..=251")]
    InvalidPrime(u32),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("forms live in different rings")]
    RingMismatch,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("exponent {exponent:?} leaves the weight window of the ring")]
    WindowOverflow { exponent: Vec<i32> },
    #[error("term is not a section of the ring: {0}")]
    NotRegular(String),
    #[error("variable T{0} is not a log variable of the ring")]
    NotLogVariable(u8),
    #[error("form has a pole along T{0}")]
    Pole(u8),
    #[error("form is not closed")]
    NotClosed,
    #[error("form is not homogeneous of the required shape: {0}")]
    NotHomogeneous(String),
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
