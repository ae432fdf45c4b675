use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A matrix that must be inverted is singular (or nearly so).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A randomized search exhausted its budget without success.
    #[error("search failed: {0}")]
    Search(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit status associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Syntax { .. } | Error::Json(_) | Error::Io(_) => 1,
            Error::Numerical(_) => 2,
            Error::Search(_) => 3,
        }
    }
}
