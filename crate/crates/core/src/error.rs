use thiserror::Error;

/// Errors shared by every module in this crate.
///
/// The CLI maps the variants onto process exit codes, so the split matters:
/// a violated precondition is the caller's fault, a resource cap is a
/// configuration limit, and an inconclusive verdict is an honest "the window
/// was too short to decide".
#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceCap(msg.into())
    }
    pub fn inconclusive(msg: impl Into<String>) -> Self {
        Error::Inconclusive(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
