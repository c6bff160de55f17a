//! Error type shared by the whole crate.

use alloc::string::String;
use core::fmt;

/// Failure modes of the numerical operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the documented domain of an operation.
    Domain(String),
    /// An iterative scheme ran out of budget. Carries the best value reached
    /// and the last error estimate so callers can still inspect the result.
    Convergence {
        what: String,
        best: f64,
        error_estimate: f64,
    },
    /// A structural precondition (measure match, volume orthogonality, ...)
    /// was violated.
    Precondition(String),
    /// The barycenter is zero, so the half-space alignment direction nu(z)
    /// is undefined.
    Alignment(String),
    /// A search could not produce a feasible starting point.
    Infeasible(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Convergence {
                what,
                best,
                error_estimate,
            } => write!(
                f,
                "convergence failure in {what}: best {best:.17e}, error estimate {error_estimate:.3e}"
            ),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Alignment(msg) => write!(f, "alignment error: {msg}"),
            Error::Infeasible(msg) => write!(f, "infeasible: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub(crate) type Result<T> = core::result::Result<T, Error>;
