//! Crate-wide error type.

use thiserror::Error;

use crate::linalg::HermitianMatrix;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("negative input where a nonnegative real was required")]
    NegativeInput,

    #[error("Jacobi eigensolver did not converge within the sweep cap")]
    EigNonConvergence,

    #[error("matrix is not positive semidefinite (lambda_min = {lambda_min:.3e})")]
    NotPsd { lambda_min: f64 },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("functional family is empty")]
    EmptyFamily,

    #[error(
        "ambiguous boundary: w = {w:.9} is within the decision band; best witness reaches \
         lambda_min = {lambda_min:.3e}"
    )]
    AmbiguousBoundary {
        w: f64,
        lambda_min: f64,
        beta: HermitianMatrix,
    },

    #[error("certificate rejected: state does not dominate the form (lambda_min = {lambda_min:.3e})")]
    RejectedCertificate { lambda_min: f64 },

    #[error("certificate inconsistent: GNS support collapsed while the form is nonzero")]
    InconsistentCertificate,

    #[error("2-summing norm is unbounded: the family does not span the dual space")]
    Unbounded,

    #[error("numerical radius of alpha is zero but the coupled term is not")]
    ZeroRadius,

    #[error("feasibility engine stalled: {0}")]
    SolverStall(String),
}
