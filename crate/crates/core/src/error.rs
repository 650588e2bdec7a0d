use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Modes handed to an overlap integral do not share an integration domain.
    #[error("mode domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("adaptive quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("coupling element {0} is missing from the tensor")]
    MissingCoupling(String),

    #[error("energy denominator of pathway {pathway} is singular ({denominator:e} rad/s)")]
    SingularDenominator { pathway: &'static str, denominator: f64 },

    #[error("Fock basis dimension {dimension} exceeds the cap of {cap}")]
    DimensionOverflow { dimension: u128, cap: usize },

    /// The assembled matrix differs from its transpose.
    #[error("Hamiltonian matrix is not Hermitian: relative residual {residual:e}")]
    NonHermitian { residual: f64 },

    #[error("norm drift {drift:e} exceeds tolerance {tolerance:e} at t = {time}")]
    NormDrift { drift: f64, tolerance: f64, time: f64 },
}

impl Error {
    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::NormDrift { .. } | Error::SingularDenominator { .. }
        )
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}
