use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Cartan type: {0}")]
    InvalidType(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("pole does not cancel: {0}")]
    PoleRemains(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("limit exceeded: {0}")]
    Limit(String),
}

impl Error {
    pub fn parse(s: impl Into<String>) -> Error {
        Error::Parse(s.into())
    }
    pub fn invalid(s: impl Into<String>) -> Error {
        Error::Invalid(s.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
