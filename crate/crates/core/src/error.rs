use thiserror::Error;

/// Errors raised by the model, the analysis layer and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("exp(-z^2) overflows for z = {re} + {im}i")]
    OverflowRegion { re: f64, im: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("expansion outside its regime: {0}")]
    Range(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("no admissible DIT minimum for v0 = {v0}, x = {x}")]
    NoMinimum { v0: f64, x: f64 },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("integration path passes within {distance:e} of the pole k0")]
    PoleProximity { distance: f64 },

    #[error("right boundary activated: |psi| = {magnitude:e} at t = {t}")]
    QuiescenceViolated { t: f64, magnitude: f64 },
}

impl Error {
    /// Stable machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::OverflowRegion { .. } => "OverflowRegion",
            Error::Domain(_) => "DomainError",
            Error::Range(_) => "RangeError",
            Error::Convergence(_) => "ConvergenceError",
            Error::NoMinimum { .. } => "NoMinimum",
            Error::Undefined(_) => "Undefined",
            Error::PoleProximity { .. } => "PoleProximity",
            Error::QuiescenceViolated { .. } => "QuiescenceViolated",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
