//! Error type shared across the crate.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// A vector or matrix does not have the length the contract requires.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// A parameter violates its documented range or ordering constraint.
    InvalidArgument(String),
    /// A fitness value passed to the optimizer was NaN or infinite.
    NonFiniteFitness {
        index: usize,
    },
    /// An environment adapter broke the provider protocol.
    AdapterProtocol(String),
    Io(std::io::Error),
    /// A config or checkpoint file failed to parse or validate.
    Format(String),
    /// Resume was attempted against a checkpoint from a different config.
    ConfigMismatch {
        expected: u64,
        got: u64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                context,
                expected,
                got,
            } => write!(f, "{context}: expected length {expected}, got {got}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonFiniteFitness { index } => {
                write!(f, "fitness at index {index} is not finite")
            }
            Error::AdapterProtocol(msg) => write!(f, "environment adapter violation: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
            Error::ConfigMismatch { expected, got } => write!(
                f,
                "checkpoint config hash {got:#018x} does not match current config {expected:#018x}"
            ),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}
