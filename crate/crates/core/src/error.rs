use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid tensor-factor layout (duplicate labels, unknown labels, ...).
    #[error("layout error: {0}")]
    Layout(String),
    /// Input violates a mathematical precondition (not Hermitian, not PSD, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Invalid caller-supplied parameter (trial counts, ranges, ...).
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Problem dimension exceeds a hard size guard.
    #[error("size error: {0}")]
    Size(String),
    /// Numerical failure inside a solver or factorization.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// I/O failure, with path context.
    #[error("io error ({path}): {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Malformed configuration or serialized data.
    #[error("config error: {0}")]
    Config(String),
    /// A guaranteed inequality was violated beyond tolerance; signals an
    /// implementation bug, never silently logged.
    #[error("bound violation: {0}")]
    Violation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
