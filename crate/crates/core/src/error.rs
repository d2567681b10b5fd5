use thiserror::Error;

/// Errors raised by distribution, system, and ordering evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EcdError {
    #[error("parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("`{name}` = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("tail probability underflows working precision at x = {x}")]
    Saturated { x: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("component set is empty")]
    EmptyComponents,

    #[error("components do not share {what}")]
    Heterogeneous { what: &'static str },

    #[error("systems must be of the same kind")]
    KindMismatch,

    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: &'static str },

    #[error("every grid point is saturated")]
    AllSaturated,
}

pub type Result<T> = std::result::Result<T, EcdError>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(EcdError::InvalidParameter {
            name,
            value,
            requirement: "finite and > 0",
        })
    }
}

pub(crate) fn check_abscissa(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        Err(EcdError::Domain {
            name: "x",
            value: x,
            domain: "[0, inf)",
        })
    } else {
        Ok(x)
    }
}
