//! Error type shared by all modules.
//!
//! Each variant carries a stable machine-readable code string; the CLI
//! surfaces these codes verbatim in its error objects.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The root index condition `k | n0` fails, or the input has no root at all.
    #[error("no convolution root: {0}")]
    NoRoot(String),

    /// The leading coefficient has no exact rational k-th root.
    #[error("leading coefficient has no exact rational root: {0}")]
    IrrationalLeadingRoot(String),

    /// Inversion is impossible because the leading forward value is zero.
    #[error("non-invertible input: {0}")]
    NonInvertible(String),

    /// The nested-ratio denominator vanishes.
    #[error("degenerate ratio: {0}")]
    Degenerate(String),

    /// The input is not a probability distribution.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// The supplied sequence window is too short for the requested output.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A precondition on integer arguments fails (e.g. k > n, factorization mismatch).
    #[error("domain error: {0}")]
    Domain(String),

    /// A rational literal could not be parsed.
    #[error("bad rational literal: {0}")]
    BadRational(String),
}

impl Error {
    /// Stable code string for machine-readable error reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NoRoot(_) => "NO_ROOT",
            Error::IrrationalLeadingRoot(_) => "IRRATIONAL_LEADING_ROOT",
            Error::NonInvertible(_) => "NON_INVERTIBLE",
            Error::Degenerate(_) => "DEGENERATE",
            Error::InvalidDistribution(_) => "INVALID_DISTRIBUTION",
            Error::InsufficientData(_) => "INSUFFICIENT_DATA",
            Error::Domain(_) => "DOMAIN_ERROR",
            Error::BadRational(_) => "BAD_RATIONAL",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
