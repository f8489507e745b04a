use thiserror::Error;

use crate::geometry::MultiIndex;

/// Errors produced by stencil construction and certification.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} weights but {right} values")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("derivative order {order} exceeds kernel smoothness (maximum {max})")]
    SmoothnessExceeded { order: u32, max: u32 },

    #[error("operator of order {order} is not admissible for {kernel}: requires {requirement}")]
    OperatorNotAdmissible {
        order: u32,
        kernel: String,
        requirement: String,
    },

    #[error(
        "inconsistent moment system: the moment equation for monomial {moment} cannot be satisfied (residual {residual:e})"
    )]
    InconsistentMoments { moment: MultiIndex, residual: f64 },

    #[error("numerically singular saddle system: {0}")]
    SingularSystem(String),

    #[error("weights are not exact on the polynomial space (moment residual {residual:e})")]
    ExactnessViolated { residual: f64 },

    #[error("coefficients violate the moment conditions (residual {residual:e})")]
    MomentConditionViolated { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
