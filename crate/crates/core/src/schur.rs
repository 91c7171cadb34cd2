//! Numerical-radius Schur multiplier norm `‖S_α‖_w = sup w(α∘x)/w(x)`.
//!
//! The certified upper bound goes through the ℓ¹ → ℓ∞ factorization
//! criterion: α acts as a bilinear form on ℓ¹_n and its wH dual norm bounds
//! the multiplier norm (exactly for real α with the sign family, from above
//! on the grid family for complex α). The lower bound samples the defining
//! supremum directly, so any discrepancy beyond tolerance is surfaced rather
//! than hidden.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::duality::{dual_norm_with, BilinearForm, DualOptions, DualOutcome, Variant};
use crate::error::Error;
use crate::linalg::{ComplexMatrix, C64};
use crate::minspace::FunctionalFamily;
use crate::numrad::numerical_radius;
use crate::reps::Space;
use crate::sampling::{random_matrix, rng_from_seed};

/// Dimension cap with the exact real sign family.
pub const SCHUR_REAL_CAP: usize = 8;
/// Dimension cap with the complex grid family.
pub const SCHUR_COMPLEX_CAP: usize = 4;

/// Scalar field of the multiplier; selects the ℓ¹ functional family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

#[derive(Debug, Clone)]
pub struct SchurInstance {
    alpha: ComplexMatrix,
    field: ScalarField,
}

impl SchurInstance {
    pub fn new(alpha: ComplexMatrix, field: ScalarField) -> Result<Self, Error> {
        if !alpha.is_square() {
            return Err(Error::Shape("Schur multiplier needs a square matrix".into()));
        }
        let cap = match field {
            ScalarField::Real => SCHUR_REAL_CAP,
            ScalarField::Complex => SCHUR_COMPLEX_CAP,
        };
        if alpha.rows() == 0 || alpha.rows() > cap {
            return Err(Error::DimensionCap {
                dim: alpha.rows(),
                cap,
            });
        }
        Ok(Self { alpha, field })
    }

    pub fn alpha(&self) -> &ComplexMatrix {
        &self.alpha
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn family(&self) -> Result<FunctionalFamily, Error> {
        match self.field {
            ScalarField::Real => FunctionalFamily::l1_sign(self.alpha.rows()),
            ScalarField::Complex => {
                FunctionalFamily::l1_complex(self.alpha.rows(), crate::minspace::DEFAULT_GRID_PHASES)
            }
        }
    }
}

/// Entrywise (Schur) product.
pub fn schur_product(alpha: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!((alpha.rows(), alpha.cols()), (x.rows(), x.cols()));
    let data: Vec<C64> = alpha
        .entries()
        .iter()
        .zip(x.entries())
        .map(|(a, b)| a * b)
        .collect();
    ComplexMatrix::new(alpha.rows(), alpha.cols(), data).expect("finite entries")
}

/// Certified upper bound on `‖S_α‖_w`: the wH dual norm of α as a bilinear
/// form on ℓ¹_n. Exact on real sign families; an upper approximation on
/// complex grid families (flagged by the family's `exact` bit).
pub fn schur_w_upper(inst: &SchurInstance, tol: f64) -> Result<DualOutcome, Error> {
    let family = Arc::new(inst.family()?);
    let t = BilinearForm::new(Space::Min { family }, inst.alpha.clone())?;
    dual_norm_with(
        &t,
        Variant::WH,
        &DualOptions {
            tol,
            ..DualOptions::default()
        },
    )
}

/// Sampled lower bound on `‖S_α‖_w`: the max of `w(α∘x)/w(x)` over a fixed
/// battery (matrix units, the Jordan cell, rank-one projectors) and seeded
/// random matrices. Always a valid lower bound.
pub fn schur_w_lower(inst: &SchurInstance, trials: usize, seed: u64) -> Result<f64, Error> {
    let n = inst.alpha.rows();
    let mut candidates: Vec<ComplexMatrix> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut e = ComplexMatrix::zeros(n, n);
            e.set(i, j, crate::linalg::cx(1.0, 0.0));
            candidates.push(e);
        }
    }
    let mut jordan = ComplexMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        jordan.set(i, i + 1, crate::linalg::cx(1.0, 0.0));
    }
    candidates.push(jordan);
    candidates.push(ComplexMatrix::identity(n));

    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let g = random_matrix(&mut rng, n, 1);
        let mut rank_one = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                rank_one.set(i, j, g.get(i, 0) * g.get(j, 0).conj());
            }
        }
        candidates.push(rank_one);
        candidates.push(random_matrix(&mut rng, n, n));
    }

    let mut best = 0.0f64;
    for x in &candidates {
        let wx = numerical_radius(x)?;
        if wx < 1e-12 {
            continue;
        }
        let ratio = numerical_radius(&schur_product(&inst.alpha, x))? / wx;
        best = best.max(ratio);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cx;

    #[test]
    fn identity_multiplier_is_one() {
        let inst = SchurInstance::new(ComplexMatrix::identity(2), ScalarField::Real).unwrap();
        let lower = schur_w_lower(&inst, 20, 1).unwrap();
        assert!(lower >= 1.0 - 1e-9, "lower = {lower}");
        let upper = match schur_w_upper(&inst, 1e-6).unwrap() {
            DualOutcome::Converged(c) => c.value,
            other => panic!("{other:?}"),
        };
        assert!((upper - 1.0).abs() < 1e-4, "upper = {upper}");
        assert!(lower <= upper + 1e-3);
    }

    #[test]
    fn zero_multiplier() {
        let inst = SchurInstance::new(ComplexMatrix::zeros(2, 2), ScalarField::Real).unwrap();
        assert_eq!(schur_w_lower(&inst, 5, 1).unwrap(), 0.0);
        let upper = schur_w_upper(&inst, 1e-6).unwrap();
        assert_eq!(upper.cert().unwrap().value, 0.0);
    }

    #[test]
    fn scaled_jordan_lower_bound_is_two() {
        // α = [[0,2],[0,0]]: x = e12 gives w(α∘x) = w(2e12) = 1 over
        // w(e12) = 1/2.
        let mut alpha = ComplexMatrix::zeros(2, 2);
        alpha.set(0, 1, cx(2.0, 0.0));
        let inst = SchurInstance::new(alpha, ScalarField::Real).unwrap();
        let lower = schur_w_lower(&inst, 10, 3).unwrap();
        assert!(lower >= 2.0 - 1e-9, "lower = {lower}");
        let upper = match schur_w_upper(&inst, 1e-6).unwrap() {
            DualOutcome::Converged(c) => c.value,
            other => panic!("{other:?}"),
        };
        assert!(upper >= lower - 1e-3, "upper = {upper}, lower = {lower}");
    }

    #[test]
    fn all_ones_multiplier_is_identity_map() {
        let alpha = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let inst = SchurInstance::new(alpha, ScalarField::Real).unwrap();
        let upper = match schur_w_upper(&inst, 1e-6).unwrap() {
            DualOutcome::Converged(c) => c.value,
            other => panic!("{other:?}"),
        };
        assert!((upper - 1.0).abs() < 1e-3, "upper = {upper}");
        let lower = schur_w_lower(&inst, 20, 5).unwrap();
        assert!(lower >= 1.0 - 1e-9 && lower <= upper + 1e-3);
    }

    #[test]
    fn diagonal_bracket() {
        let alpha = ComplexMatrix::from_real(3, 3, &[0.7, 0.0, 0.0, 0.0, -1.4, 0.0, 0.0, 0.0, 0.3])
            .unwrap();
        let inst = SchurInstance::new(alpha, ScalarField::Real).unwrap();
        let lower = schur_w_lower(&inst, 10, 7).unwrap();
        let upper = match schur_w_upper(&inst, 1e-6).unwrap() {
            DualOutcome::Converged(c) => c.value,
            other => panic!("{other:?}"),
        };
        assert!(lower >= 1.4 - 1e-9);
        assert!((upper - 1.4).abs() < 1e-3, "upper = {upper}");
    }

    #[test]
    fn complex_grid_upper_is_sound() {
        let mut alpha = ComplexMatrix::zeros(2, 2);
        alpha.set(0, 1, cx(0.0, 1.0));
        alpha.set(1, 0, cx(0.5, 0.0));
        let inst = SchurInstance::new(alpha, ScalarField::Complex).unwrap();
        let lower = schur_w_lower(&inst, 40, 11).unwrap();
        let upper = match schur_w_upper(&inst, 1e-5).unwrap() {
            DualOutcome::Converged(c) => c.value,
            other => panic!("{other:?}"),
        };
        assert!(lower <= upper + 1e-3, "lower = {lower}, upper = {upper}");
    }
}
