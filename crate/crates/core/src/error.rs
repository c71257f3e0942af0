use thiserror::Error;

/// Every failure the library reports. The CLI maps variants onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("data integrity error: {0}")]
    DataIntegrity(String),

    #[error("resource error: {what} exceeds the configured ceiling of {ceiling}")]
    Resource { what: String, ceiling: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// Process exit code: 2 for bad input, 3 for failed checks, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_)
            | Error::Parse { .. }
            | Error::DataIntegrity(_)
            | Error::Resource { .. }
            | Error::Unsupported(_)
            | Error::Pole(_) => 2,
            Error::Invariant(_) | Error::Internal(_) => 3,
            Error::Io(_) => 4,
        }
    }
}
