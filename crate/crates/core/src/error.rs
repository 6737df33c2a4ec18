use alloc::string::String;
use core::fmt;

use crate::tensor::Shape;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(String),
    ShapeMismatch { expected: Shape, found: Shape },
    /// A NaN or infinity showed up mid-computation.
    NonFinite { stage: &'static str, iteration: usize },
    /// Malformed serialized data.
    Format(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite { stage, iteration } => {
                write!(f, "non-finite value in {stage} at iteration {iteration}")
            }
            Error::Format(msg) => write!(f, "format error: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
