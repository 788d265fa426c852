use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Every non-finite intermediate result is reported through one of these
/// variants; no public function returns `NaN` or `Inf` silently.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An exponential factor left the double-precision range.
    #[error("overflow evaluating {what} at z = {z}")]
    Overflow { what: &'static str, z: Complex64 },

    /// The argument lies on (or within tolerance of) a branch cut of r(s).
    #[error("s = {s} lies on a branch cut of r(s)")]
    BranchCut { s: Complex64 },

    /// A documented precondition was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The reference quadrature did not reach its tolerance.
    #[error("oracle failed to converge at z = {z} (estimated error {estimate:e})")]
    OracleFailure { z: Complex64, estimate: f64 },

    /// A sampled point violated a certified bound.
    #[error("certification failed at z = {z}: {reason}")]
    Certification { z: Complex64, reason: String },

    /// Too few quadrature points to integrate the projection exactly.
    #[error("quadrature order {order} is below the minimum {min}")]
    QuadratureOrder { order: usize, min: usize },

    /// Relative error requested for a target with zero norm.
    #[error("target has zero L2 norm")]
    ZeroNorm,

    /// Too few usable samples for a rate fit.
    #[error("rate fit needs at least {needed} points above round-off, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
