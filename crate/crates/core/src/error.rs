use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no genus exists: {0}")]
    NoGenus(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("missing file: {0}")]
    MissingFile(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("Ramanujan bound violated: {0}")]
    RamanujanBound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! invalid {
    ($($t:tt)*) => { $crate::error::Error::InvalidInput(format!($($t)*)) };
}
macro_rules! inconsistent {
    ($($t:tt)*) => { $crate::error::Error::Inconsistency(format!($($t)*)) };
}
pub(crate) use inconsistent;
pub(crate) use invalid;
