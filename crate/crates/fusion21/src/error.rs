use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the object is defined.
    #[error("parameter domain: {0}")]
    Domain(String),
    /// A denominator came within the pole-proximity threshold of zero.
    #[error("singular evaluation of {what}: |denominator| = {value:e}")]
    Singular { what: String, value: f64 },
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
