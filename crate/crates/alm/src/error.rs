//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A problem callback produced a non-finite value.
    #[error("{context}: component {index} is not finite")]
    NonFiniteEval { context: &'static str, index: usize },

    /// A problem callback returned the wrong number of entries.
    #[error("{context}: expected {expected} entries, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// Newton mode (or an explicit Hessian request) on a problem without
    /// Hessian callbacks.
    #[error("problem `{0}` does not provide Hessian callbacks")]
    MissingHessians(String),

    /// Problem lookup failed.
    #[error("unknown problem `{name}` (available: {available})")]
    UnknownProblem { name: String, available: String },

    /// `|s/rho - c|` too large to square safely in the smoothing kernel.
    #[error("smoothing kernel overflow: |s/rho - c| = {t:e} at component {index}")]
    SmoothingOverflow { t: f64, index: usize },

    /// The unscaled penalty term left the representable range.
    #[error("penalty term overflow at constraint {index}; use the rho-scaled evaluation")]
    PenaltyOverflow { index: usize },

    /// A Hessian callback returned a matrix that is not symmetric.
    #[error("{context}: asymmetry {asymmetry:e} exceeds tolerance")]
    AsymmetricHessian {
        context: &'static str,
        asymmetry: f64,
    },

    /// Equality-constrained entry point on a problem with p = 0.
    #[error("problem `{0}` has no equality constraints")]
    NoEqualities(String),

    /// Configuration value out of range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Hessian could not be regularized to positive definite.
    #[error("failed to regularize Hessian after {0} shift attempts")]
    RegularizationFailed(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
