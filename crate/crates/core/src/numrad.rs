//! Numerical radius, the scalar balancing identity, and Ando witness
//! certification.
//!
//! The numerical radius of a square matrix is
//! `w(α) = max_θ λ_max((e^{iθ}α + e^{-iθ}α†)/2)`. Ando's theorem states that
//! `w(α) ≤ 1` iff there is a Hermitian β making
//! `P(β) = [[1+β, α], [α†, 1-β]]` positive semidefinite; `ando_witness`
//! produces such a β or a certified refusal.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{cx, hermitian_eig, ComplexMatrix, HermitianMatrix, C64};
use crate::solver::hermitian::max_lambda_min_free;

/// Dimension cap for the witness search.
pub const ANDO_DIM_CAP: usize = 16;

/// Number of coarse grid points for the θ sweep.
const THETA_GRID: usize = 64;

/// Where the numerical radius is attained: the maximizing angle and a unit
/// vector ξ with `ξ†·Re(e^{iθ}α)·ξ = w(α)`.
#[derive(Debug, Clone)]
pub struct RadiusAttainment {
    pub value: f64,
    pub theta: f64,
    pub vector: Vec<C64>,
}

fn rotated_hermitian_part(m: &ComplexMatrix, theta: f64) -> HermitianMatrix {
    let phase = cx(theta.cos(), theta.sin());
    let rotated = m.scale(phase);
    let herm = rotated.add(&rotated.adjoint()).scale(cx(0.5, 0.0));
    HermitianMatrix::from_matrix(&herm, 1e-9 * (1.0 + herm.max_abs()))
        .expect("Hermitian part is Hermitian")
}

fn lambda_max_at(m: &ComplexMatrix, theta: f64) -> (f64, Vec<C64>) {
    let h = rotated_hermitian_part(m, theta);
    let (vals, vecs) = hermitian_eig(&h).expect("eigendecomposition of the rotated part");
    let n = h.dim();
    (vals[n - 1], vecs.column(n - 1))
}

/// Numerical radius with attainment data, to absolute tolerance ~1e-9:
/// a 64-point grid over θ followed by golden-section refinement of the three
/// best grid cells.
pub fn numerical_radius_attained(m: &ComplexMatrix) -> Result<RadiusAttainment, Error> {
    if !m.is_square() {
        return Err(Error::Shape("numerical radius needs a square matrix".into()));
    }
    let n = m.rows();
    if n == 0 || m.max_abs() == 0.0 {
        return Ok(RadiusAttainment {
            value: 0.0,
            theta: 0.0,
            vector: vec![cx(1.0, 0.0); n.max(1)],
        });
    }

    let step = 2.0 * std::f64::consts::PI / THETA_GRID as f64;
    let mut grid: Vec<(f64, f64)> = (0..THETA_GRID)
        .map(|k| {
            let theta = k as f64 * step;
            (lambda_max_at(m, theta).0, theta)
        })
        .collect();
    grid.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = grid[0];
    for &(_, theta0) in grid.iter().take(3) {
        let mut lo = theta0 - step;
        let mut hi = theta0 + step;
        let mut x1 = hi - golden * (hi - lo);
        let mut x2 = lo + golden * (hi - lo);
        let mut f1 = lambda_max_at(m, x1).0;
        let mut f2 = lambda_max_at(m, x2).0;
        for _ in 0..64 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + golden * (hi - lo);
                f2 = lambda_max_at(m, x2).0;
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - golden * (hi - lo);
                f1 = lambda_max_at(m, x1).0;
            }
        }
        let (theta, val) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
        if val > best.0 {
            best = (val, theta);
        }
    }

    let (value, vector) = lambda_max_at(m, best.1);
    Ok(RadiusAttainment {
        value: value.max(best.0),
        theta: best.1,
        vector,
    })
}

/// Numerical radius `w(α)`.
pub fn numerical_radius(m: &ComplexMatrix) -> Result<f64, Error> {
    numerical_radius_attained(m).map(|a| a.value)
}

/// The scalar identity `inf_λ (λa + λ⁻¹b)/2 = √(ab)`: returns the minimizing
/// λ and the value. Degenerate products return λ = 1.
pub fn balance(a: f64, b: f64) -> Result<(f64, f64), Error> {
    if a < 0.0 || b < 0.0 {
        return Err(Error::NegativeInput);
    }
    if a * b == 0.0 {
        return Ok((1.0, 0.0));
    }
    Ok(((b / a).sqrt(), (a * b).sqrt()))
}

/// Hermitian β with `P = [[1+β, α], [α†, 1-β]]` close to PSD, certifying
/// `w(α) ≤ 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AndoWitness {
    pub beta: HermitianMatrix,
    pub p: HermitianMatrix,
    pub lambda_min: f64,
}

/// Verdict of the witness search.
#[derive(Debug, Clone)]
pub enum AndoOutcome {
    Witness(AndoWitness),
    /// `w(α) > 1`; carries the measured radius. The attainment vector of the
    /// radius bounds every `λ_min(P(β))` by `1 - w` from above, so no witness
    /// exists.
    Infeasible { w: f64 },
}

/// Assemble `P(β)` from `α` and `β`.
pub fn ando_block(alpha: &ComplexMatrix, beta: &HermitianMatrix) -> HermitianMatrix {
    let n = alpha.rows();
    assert_eq!(beta.dim(), n);
    let mut p = ComplexMatrix::identity(2 * n);
    p.set_block(0, n, alpha);
    p.set_block(n, 0, &alpha.adjoint());
    let b = beta.to_matrix();
    for i in 0..n {
        for j in 0..n {
            p.set(i, j, p.get(i, j) + b.get(i, j));
            p.set(n + i, n + j, p.get(n + i, n + j) - b.get(i, j));
        }
    }
    HermitianMatrix::from_matrix(&p, 1e-9 * (1.0 + p.max_abs())).expect("P(β) is Hermitian")
}

/// Search for an Ando witness for `α`.
///
/// Returns `Witness` when a β with `λ_min(P(β)) ≥ -tol` is found, and
/// `Infeasible` when `w(α) > 1 + 10·tol`. Inside the boundary band
/// `w ∈ [1-10·tol, 1+10·tol]` a failed search reports `AmbiguousBoundary`
/// carrying the best β instead of guessing.
pub fn ando_witness(alpha: &ComplexMatrix, tol: f64) -> Result<AndoOutcome, Error> {
    if !alpha.is_square() {
        return Err(Error::Shape("ando_witness needs a square matrix".into()));
    }
    let n = alpha.rows();
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if n > ANDO_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: ANDO_DIM_CAP,
        });
    }
    if alpha.max_abs() == 0.0 {
        let beta = HermitianMatrix::zeros(n);
        let p = ando_block(alpha, &beta);
        return Ok(AndoOutcome::Witness(AndoWitness {
            beta,
            p,
            lambda_min: 1.0,
        }));
    }

    let w = numerical_radius(alpha)?;
    let band = 10.0 * tol;
    if w > 1.0 + band {
        return Ok(AndoOutcome::Infeasible { w });
    }

    let res = max_lambda_min_free(alpha)?;
    let p = ando_block(alpha, &res.beta);
    let (vals, _) = hermitian_eig(&p)?;
    let lambda_min = vals[0];
    if lambda_min >= -tol {
        return Ok(AndoOutcome::Witness(AndoWitness {
            beta: res.beta,
            p,
            lambda_min,
        }));
    }
    if w >= 1.0 - band {
        return Err(Error::AmbiguousBoundary {
            w,
            lambda_min,
            beta: res.beta,
        });
    }
    // w is clearly below 1 yet the search missed the optimum 1-w; the barrier
    // engine should never land here.
    Err(Error::SolverStall(format!(
        "witness search reached lambda_min = {lambda_min:.3e} with w = {w:.9}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;

    #[test]
    fn jordan_cell_radius_is_half() {
        let j = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let w = numerical_radius(&j).unwrap();
        assert!((w - 0.5).abs() < 1e-9, "w = {w}");
    }

    #[test]
    fn identity_radius_is_one() {
        for n in 1..=4 {
            let w = numerical_radius(&ComplexMatrix::identity(n)).unwrap();
            assert!((w - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn diagonal_radius_is_max_modulus() {
        let d = ComplexMatrix::diagonal(&[cx(0.3, 0.4), cx(-2.0, 0.0), cx(0.0, 1.5)]);
        let w = numerical_radius(&d).unwrap();
        assert!((w - 2.0).abs() < 1e-9);
    }

    #[test]
    fn radius_rejects_rectangular() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(numerical_radius(&m).is_err());
    }

    #[test]
    fn balance_examples() {
        assert_eq!(balance(1.0, 1.0).unwrap(), (1.0, 1.0));
        let (_, v) = balance(4.0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert_eq!(balance(0.0, 5.0).unwrap(), (1.0, 0.0));
        assert!(balance(-1.0, 2.0).is_err());
        // The minimizing λ equalizes the two summands.
        let (l, v) = balance(4.0, 1.0).unwrap();
        assert!(((l * 4.0 + 1.0 / l) / 2.0 - v).abs() < 1e-12);
    }

    #[test]
    fn witness_for_zero_matrix() {
        let alpha = ComplexMatrix::zeros(3, 3);
        match ando_witness(&alpha, 1e-8).unwrap() {
            AndoOutcome::Witness(w) => {
                assert_eq!(w.beta.to_matrix().max_abs(), 0.0);
                assert!((w.lambda_min - 1.0).abs() < 1e-12);
                assert!(w
                    .p
                    .to_matrix()
                    .max_abs_diff(&ComplexMatrix::identity(6))
                    < 1e-12);
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn spec_beta_for_scaled_jordan_cell() {
        // β = diag(1, -1) is a valid witness for α = [[0,2],[0,0]]:
        // P(β) has eigenvalues {4, 0, 0, 0}.
        let alpha = ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        let beta = HermitianMatrix::from_real_diag(&[1.0, -1.0]);
        let p = ando_block(&alpha, &beta);
        let (vals, _) = hermitian_eig(&p).unwrap();
        assert!(vals[..3].iter().all(|v| v.abs() < 1e-12));
        assert!((vals[3] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn witness_at_the_boundary() {
        let alpha = ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        match ando_witness(&alpha, 1e-8).unwrap() {
            AndoOutcome::Witness(w) => assert!(w.lambda_min >= -1e-8),
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_above_one() {
        let alpha = ComplexMatrix::identity(3).scale(cx(1.2, 0.0));
        match ando_witness(&alpha, 1e-8).unwrap() {
            AndoOutcome::Infeasible { w } => assert!((w - 1.2).abs() < 1e-8),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn radius_norm_sandwich() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![cx(0.1, 0.4), cx(-1.0, 0.2), cx(0.3, 0.0), cx(0.0, -0.9)],
        )
        .unwrap();
        let w = numerical_radius(&m).unwrap();
        let nrm = operator_norm(&m);
        assert!(w <= nrm + 1e-9);
        assert!(nrm <= 2.0 * w + 1e-9);
    }
}
