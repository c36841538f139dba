use thiserror::Error;

/// Errors raised by the arithmetic and classification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation
    /// (division by zero, non-unit residue, pole of Gamma, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration would exceed the configured size guard.
    #[error("resource guard: {0}")]
    ResourceGuard(String),

    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A series is zero up to its known precision, so its valuation is unknown.
    #[error("series is zero to precision O(w^{prec})")]
    ZeroToPrecision { prec: i64 },

    /// A comparison or extraction asked for more coefficients than are known.
    #[error("insufficient precision: need exponent < {needed}, known below {available}")]
    InsufficientPrecision { needed: i64, available: i64 },

    /// An adaptive procedure did not settle before its ceiling.
    #[error("no convergence: {0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn guard(msg: impl Into<String>) -> Self {
        Error::ResourceGuard(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
