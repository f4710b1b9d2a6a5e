use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context error: {0}")]
    Context(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("membership error: {0}")]
    Membership(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("malformed MC element: {0}")]
    MalformedMc(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
