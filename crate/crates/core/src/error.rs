use thiserror::Error;

/// Errors raised by the algebra kernel, the checkers and the manifest layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The caller violated an operation contract (wrong variable, index out
    /// of range, mismatched variable tables, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// A denominator or a power base with negative exponent evaluated to zero.
    #[error("evaluation is singular: {0}")]
    Singular(String),
    /// A square root or fractional power of a negative number was requested.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition does not hold (e.g. a 1-form is not closed).
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// The input is outside what the exact kernel can represent.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
