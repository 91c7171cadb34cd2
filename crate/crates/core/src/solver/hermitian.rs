//! Barrier-Newton maximization of `λ_min(P₀ + diag(β, -β))` over Hermitian β.
//!
//! This is the witness search behind Ando's characterization: for the block
//! matrix `P(β) = [[1+β, α], [α†, 1-β]]` the optimal value equals
//! `1 - w(α)`, and the maximizer is the certificate the caller wants. The
//! smooth path problem `max t + μ·logdet(P(β) - t·I)` is solved by damped
//! Newton steps with a decreasing μ schedule.

use crate::error::Error;
use crate::linalg::{cx, Cholesky, ComplexMatrix, HermitianMatrix, C64};
use crate::solver::{hermitian_basis, solve_real};

pub(crate) struct FreeMaxResult {
    pub beta: HermitianMatrix,
}

/// Triplets of `diag(E_k, -E_k)` in the 2n-dim block space.
fn mirrored_triplets(n: usize) -> Vec<Vec<(usize, usize, C64)>> {
    hermitian_basis(n)
        .into_iter()
        .map(|elem| {
            let mut out = Vec::with_capacity(elem.len() * 2);
            for &(i, j, w) in &elem {
                out.push((i, j, w));
                out.push((n + i, n + j, -w));
            }
            out
        })
        .collect()
}

fn assemble_s(
    p0: &ComplexMatrix,
    deltas: &[Vec<(usize, usize, C64)>],
    coeffs: &[f64],
    t: f64,
) -> ComplexMatrix {
    let m2 = p0.rows();
    let mut s = p0.clone();
    for (k, delta) in deltas.iter().enumerate() {
        let c = coeffs[k];
        if c == 0.0 {
            continue;
        }
        for &(i, j, w) in delta {
            s.set(i, j, s.get(i, j) + w * c);
        }
    }
    for i in 0..m2 {
        s.set(i, i, s.get(i, i) - cx(t, 0.0));
    }
    s
}

/// Maximize `λ_min(P(β))` for `P(β) = [[1+β, α], [α†, 1-β]]`.
pub(crate) fn max_lambda_min_free(alpha: &ComplexMatrix) -> Result<FreeMaxResult, Error> {
    let n = alpha.rows();
    assert!(alpha.is_square());
    let m2 = 2 * n;
    let mut p0 = ComplexMatrix::identity(m2);
    p0.set_block(0, n, alpha);
    p0.set_block(n, 0, &alpha.adjoint());

    let deltas = mirrored_triplets(n);
    let dim = deltas.len() + 1; // β parameters plus t
    let scale = 1.0 + crate::linalg::operator_norm(alpha);

    let mut coeffs = vec![0.0; deltas.len()];
    // λ_min(P(0)) >= 1 - ||α||, so this t is strictly interior.
    let mut t = 1.0 - scale - 0.1 * scale;

    let mu_end = 1e-9 * scale;
    let mut mu = 0.1 * scale;
    while mu > mu_end {
        mu *= 0.2;
        for _newton in 0..60 {
            let s = assemble_s(&p0, &deltas, &coeffs, t);
            let chol = match Cholesky::new(&s) {
                Some(c) => c,
                None => return Err(Error::SolverStall("interior point left the cone".into())),
            };
            let q = chol.inverse();
            let q2 = q.matmul(&q);

            // Gradient of Φ = t + μ logdet S.
            let mut grad = vec![0.0; dim];
            grad[0] = 1.0 - mu * q.trace().re;
            for (k, delta) in deltas.iter().enumerate() {
                let mut tr = C64::ZERO;
                for &(a, b, w) in delta {
                    tr += w * q.get(b, a);
                }
                grad[k + 1] = mu * tr.re;
            }

            // Hessian blocks.
            let mut hess = vec![0.0; dim * dim];
            hess[0] = -mu * q2.trace().re;
            for (k, delta) in deltas.iter().enumerate() {
                let mut tr = C64::ZERO;
                for &(a, b, w) in delta {
                    tr += w * q2.get(b, a);
                }
                let v = mu * tr.re;
                hess[k + 1] = v;
                hess[(k + 1) * dim] = v;
            }
            for (k, dk) in deltas.iter().enumerate() {
                for (l, dl) in deltas.iter().enumerate().skip(k) {
                    let mut acc = C64::ZERO;
                    for &(a, b, w) in dk {
                        for &(c, d, v) in dl {
                            acc += w * v * q.get(d, a) * q.get(b, c);
                        }
                    }
                    let v = -mu * acc.re;
                    hess[(k + 1) * dim + (l + 1)] = v;
                    hess[(l + 1) * dim + (k + 1)] = v;
                }
            }

            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = match solve_real(hess, dim, rhs) {
                Some(s) => s,
                None => break,
            };
            let decrement: f64 = grad.iter().zip(&step).map(|(g, d)| g * d).sum();

            // Damped line search keeping S positive definite and Φ ascending.
            let phi0 = t + mu * chol.log_det();
            let mut alpha_step = 1.0;
            let mut moved = false;
            for _ in 0..50 {
                let t_try = t + alpha_step * step[0];
                let c_try: Vec<f64> = coeffs
                    .iter()
                    .zip(&step[1..])
                    .map(|(c, d)| c + alpha_step * d)
                    .collect();
                let s_try = assemble_s(&p0, &deltas, &c_try, t_try);
                if let Some(ch) = Cholesky::new(&s_try) {
                    let phi = t_try + mu * ch.log_det();
                    if phi > phi0 - 1e-12 * (1.0 + phi0.abs()) {
                        t = t_try;
                        coeffs = c_try;
                        moved = true;
                        break;
                    }
                }
                alpha_step *= 0.5;
            }
            if !moved || decrement.abs() < 1e-4 * mu {
                break;
            }
        }
    }

    let basis = hermitian_basis(n);
    let mut beta = HermitianMatrix::zeros(n);
    let mut full = ComplexMatrix::zeros(n, n);
    for (k, elem) in basis.iter().enumerate() {
        for &(i, j, w) in elem {
            full.set(i, j, full.get(i, j) + w * coeffs[k]);
        }
    }
    for i in 0..n {
        for j in 0..=i {
            beta.set_lower(i, j, full.get(i, j));
        }
    }
    Ok(FreeMaxResult { beta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, ComplexMatrix};

    fn ando_block(alpha: &ComplexMatrix, beta: &HermitianMatrix) -> HermitianMatrix {
        let n = alpha.rows();
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
        HermitianMatrix::from_matrix(&p, 1e-10).unwrap()
    }

    #[test]
    fn reaches_the_interior_optimum() {
        // w(α) = 1/2 for the 2x2 Jordan cell, so max λ_min = 1/2.
        let alpha = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let res = max_lambda_min_free(&alpha).unwrap();
        let (vals, _) = hermitian_eig(&ando_block(&alpha, &res.beta)).unwrap();
        assert!((vals[0] - 0.5).abs() < 1e-6, "lambda_min = {}", vals[0]);
    }

    #[test]
    fn reaches_the_boundary_optimum() {
        // w(α) = 1 exactly: the optimum is 0 and must be approached from below.
        let alpha = ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        let res = max_lambda_min_free(&alpha).unwrap();
        let (vals, _) = hermitian_eig(&ando_block(&alpha, &res.beta)).unwrap();
        assert!(vals[0] > -1e-7, "lambda_min = {}", vals[0]);
        assert!(vals[0] <= 1e-7);
    }
}
