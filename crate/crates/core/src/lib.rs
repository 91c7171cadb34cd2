//! Numerical-radius Haagerup tensor norms on matrix algebras and minimal
//! quantizations of Banach spaces: representation upper bounds, dual norms by
//! state domination, explicit square factorizations `T = a*ba` / `T = aᵗba`
//! through Hilbert space, 2-summing norms, and the numerical-radius Schur
//! multiplier norm.

pub mod duality;
pub mod error;
pub mod factorize;
pub mod linalg;
pub mod minspace;
pub mod numrad;
pub mod reps;
pub mod sampling;
pub mod schur;
mod solver;

pub use duality::{
    domination_check, dual_norm, dual_norm_with, gram_pair, w_tensor_lower, BilinearForm,
    DualCert, DualOptions, DualOutcome, State, Variant,
};
pub use error::Error;
pub use factorize::{
    banach_factorize, cb_lower_column, gns_factorize, pietsch_pi2, verify_factorization,
    FactorKind, FactorReport, Factorization, GnsData,
};
pub use linalg::{
    cx, hermitian_eig, lambda_min, operator_norm, psd_sqrt, pseudo_inverse, ComplexMatrix,
    HermitianMatrix, C64, TOL_PSD,
};
pub use minspace::{embed_min_rep, min_matrix_norm, min_wh_upper, FunctionalFamily, MinVector};
pub use numrad::{ando_witness, balance, numerical_radius, AndoOutcome, AndoWitness};
pub use reps::{
    big_wh_to_wh, big_wh_upper, block_row_norm, family_rank, h_upper, minimal_representation,
    rebalance, tensor_coefficients, wh_to_big_wh, wh_upper, whp_upper, Space, TensorRep, WhRep,
};
pub use schur::{schur_product, schur_w_lower, schur_w_upper, ScalarField, SchurInstance};
