use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model or operation parameter lies outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The requested moment of the mixing law (or of a derived quantity) is infinite.
    #[error("moment of order {order} does not exist: {reason}")]
    NonexistentMoment { order: f64, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("derivative order {order} exceeds the cap of {cap}")]
    DerivativeCapExceeded { order: u32, cap: u32 },

    /// The density is unbounded at the requested point (typically x = 0).
    #[error("density is infinite at x = {at}")]
    InfiniteDensity { at: f64 },

    #[error("tail probability underflows at threshold {threshold}")]
    TailUnderflow { threshold: f64 },

    #[error("divergent: {0}")]
    Divergent(String),

    #[error("{what} did not converge (estimate {estimate:e}, error {error:e})")]
    NoConvergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::DimensionMismatch { .. } | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
