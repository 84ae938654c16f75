use thiserror::Error;

/// Errors raised by the algebraic operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("input outside the operation's domain: {0}")]
    Domain(String),

    /// A mathematical invariant that must hold by construction failed.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
