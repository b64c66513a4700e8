use thiserror::Error;

use crate::palindromic::NewtonTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular to working precision (smallest pivot {pivot:.3e})")]
    SingularMatrix { pivot: f64 },

    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("permutation index {index} out of range 1..={max}")]
    IndexOutOfRange { index: u128, max: u128 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("singular pencil: {0}")]
    SingularPencil(String),

    #[error("contour quadrature did not converge (residual {residual:.3e} at {nodes} nodes)")]
    QuadratureNotConverged { residual: f64, nodes: usize },

    #[error("Laurent coefficient U_{index} was not computed")]
    MissingCoefficient { index: i64 },

    #[error("operator class mismatch: expected a {expected} operator, got {found}")]
    WrongOperatorClass {
        expected: &'static str,
        found: &'static str,
    },

    #[error("matrix {0} is not triangular")]
    NotTriangular(String),

    #[error("equation is not uniquely solvable (sigma_min {sigma_min:.3e})")]
    NotUniquelySolvable { sigma_min: f64 },

    #[error("candidate solution fails the original equation (relative residual {residual:.3e})")]
    ResidualCheckFailed { residual: f64 },

    #[error("closed-form matrix is singular (sigma_min {sigma_min:.3e})")]
    SingularClosedFormMatrix { sigma_min: f64 },

    #[error("quadratic is not palindromic: ||f(A1) - A1|| = {deviation:.3e}")]
    NotPalindromic { deviation: f64 },

    #[error("block operator needs an even dimension, got {0}")]
    OddDimension(usize),

    #[error("Newton step {iteration} is not uniquely solvable (sigma_min {sigma_min:.3e})")]
    NewtonStepSingular { iteration: usize, sigma_min: f64 },

    #[error(
        "Newton iteration did not converge after {} steps (residual {:.3e})",
        .0.iterates.len().saturating_sub(1),
        .0.final_residual()
    )]
    NotConverged(Box<NewtonTrace>),

    #[error("Riccati residual {residual:.3e} too large for eigenvalue extraction")]
    ResidualTooLarge { residual: f64 },

    #[error("method {method} does not apply: {reason}")]
    MethodNotApplicable { method: &'static str, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
