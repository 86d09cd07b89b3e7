use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input, out-of-range index, dimension mismatch.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A configured size cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// An algebraic contract failed (e.g. a boundary of boundary is nonzero).
    #[error("contract violation: {0}")]
    Contract(String),
    /// The request is well formed but the operation is not defined for it.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Unsupported(_) => 2,
            Error::Resource(_) => 3,
            Error::Contract(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
