use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("radius {r} outside the evaluation domain ({lo}, {hi}]")]
    OutOfDomain { r: f64, lo: f64, hi: f64 },

    #[error("profile `{which}` is non-positive ({value}) at r = {r}")]
    NonPositiveProfile { which: &'static str, r: f64, value: f64 },

    #[error("integration range [{lo}, {hi}] is empty, inverted or outside [{floor}, {ceil}]")]
    BadRange { lo: f64, hi: f64, floor: f64, ceil: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {err:e})")]
    QuadratureFailed { tol: f64, err: f64 },

    #[error("structure constants violate the Jacobi identity (residual {residual:e})")]
    JacobiViolation { residual: f64 },

    #[error("field must be strictly positive (min {min})")]
    NonPositiveField { min: f64 },

    #[error("descent failed: {0}")]
    Descent(String),

    #[error("sweep needs at least {needed} distinct values, got {got}")]
    InsufficientSweep { needed: usize, got: usize },

    #[error("monodromy is not an isometry of the fiber metric: {0}")]
    NotAnIsometry(String),

    #[error("inconsistent surface data: {0}")]
    InconsistentSurface(String),

    #[error("b1 odd: the sign of the Yamabe invariant is only conjectural in this case")]
    OddFirstBetti,

    #[error("surface is not of general type (Kodaira dimension {0})")]
    NotGeneralType(String),

    #[error("gluing failed: {0}")]
    Gluing(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
