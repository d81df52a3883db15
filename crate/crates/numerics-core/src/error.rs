use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("ratio undefined: denominator vanishes")]
    UndefinedRatio,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
}
