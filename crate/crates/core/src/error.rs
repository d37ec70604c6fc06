use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("tangential derivative needs two distinct coordinates, got i = j = {0}")]
    SameCoordinate(usize),

    #[error("coordinate index {index} out of range for dimension {n}")]
    CoordinateOutOfRange { index: usize, n: usize },

    #[error("Gram matrix numerically singular: pivot {pivot:.3e} below {threshold:.3e} at step {step}")]
    GramDegenerate {
        step: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("matrix contains non-finite entries")]
    NonFiniteEntries,

    #[error("quadrature did not converge: last refinement changed the value by {change:.3e}")]
    QuadratureNonConvergent { change: f64 },

    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: &'static str, message: String },

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

impl CoreError {
    pub fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        CoreError::InvalidParameter {
            field,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
