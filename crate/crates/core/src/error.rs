use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain where the function is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition of the operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An iteration did not settle, or a consistency protocol disagreed.
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
