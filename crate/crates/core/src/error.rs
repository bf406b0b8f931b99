use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("polynomial is not primitive at p = {p}")]
    NotPrimitiveAtPrime { p: u64 },

    /// A `FactoredSystem` invariant failed; the message names the check.
    #[error("invalid factored system: {0}")]
    InvalidSystem(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A brute-force oracle was asked to scan a modulus above its bound.
    #[error("modulus {modulus} exceeds the scan bound {bound}")]
    ScanBoundExceeded { modulus: u128, bound: u128 },

    #[error("Q_{j}({n}) = 0; F(0) is undefined")]
    ZeroValue { n: u64, j: usize },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Hypotheses of a bound do not hold for the given parameters.
    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
