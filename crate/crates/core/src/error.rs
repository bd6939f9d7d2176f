use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("critical power is undefined without emitter-cavity coupling (beta = 0)")]
    NoCoupling,

    #[error("one-sided Purcell factor {0} is outside the two-sided mapping domain [0, 1)")]
    PurcellOutOfDomain(f64),

    #[error("quadrature did not converge: estimated error {error:.3e} after {evaluations} evaluations")]
    Quadrature { error: f64, evaluations: usize },

    #[error("fit did not converge after {iterations} iterations (residual norm {residual_norm:.6e})")]
    FitNotConverged {
        iterations: usize,
        residual_norm: f64,
        best: Vec<f64>,
    },

    #[error("spectrum is unusable: {0}")]
    BadSpectrum(String),
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
