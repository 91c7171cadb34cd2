//! Barrier solver for `max tr(B·R)` over `R ⪰ 0` with rank-one evaluation
//! constraints `v_k† R v_k ≤ 1`.
//!
//! This is the dual side of the Pietsch domination problem; its optimizer
//! decomposes into a finite sequence attaining the 2-summing ratio, which is
//! exactly the witness the column cb-norm bound wants.

use crate::error::Error;
use crate::linalg::{cx, Cholesky, ComplexMatrix, C64};
use crate::solver::{hermitian_basis, solve_real};

pub(crate) fn max_linear_diag_sdp(
    b: &ComplexMatrix,
    constraints: &[Vec<C64>],
) -> Result<ComplexMatrix, Error> {
    assert!(b.is_square());
    let d = b.rows();
    let basis = hermitian_basis(d);
    let nb = basis.len();

    // Strictly feasible start: a small multiple of the identity.
    let vmax = constraints
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    if vmax == 0.0 {
        return Err(Error::InvalidInput("empty constraint family".into()));
    }
    let mut r = ComplexMatrix::identity(d).scale(cx(0.4 / vmax, 0.0));
    let scale = 1.0 + b.max_abs();

    let quad = |m: &ComplexMatrix, v: &[C64]| -> f64 {
        let mv = m.matvec(v);
        v.iter().zip(&mv).map(|(a, z)| (a.conj() * z).re).sum()
    };
    let slacks = |r: &ComplexMatrix| -> Vec<f64> {
        constraints.iter().map(|v| 1.0 - quad(r, v)).collect()
    };

    // v†Ev tables for every basis element and constraint.
    let basis_quads: Vec<Vec<f64>> = constraints
        .iter()
        .map(|v| {
            basis
                .iter()
                .map(|elem| {
                    elem.iter()
                        .map(|&(i, j, w)| (v[i].conj() * w * v[j]).re)
                        .sum::<f64>()
                })
                .collect()
        })
        .collect();
    let obj_lin: Vec<f64> = basis
        .iter()
        .map(|elem| {
            elem.iter()
                .map(|&(i, j, w)| (w * b.get(j, i)).re)
                .sum::<f64>()
        })
        .collect();

    let mut mu = 0.1 * scale;
    let mu_end = 1e-11 * scale;
    while mu > mu_end {
        mu *= 0.2;
        for _newton in 0..50 {
            let rchol = match Cholesky::new(&r) {
                Some(c) => c,
                None => return Err(Error::SolverStall("left the PSD cone".into())),
            };
            let rinv = rchol.inverse();
            let s = slacks(&r);
            if s.iter().any(|&x| x <= 0.0) {
                return Err(Error::SolverStall("constraint slack vanished".into()));
            }

            let mut grad = vec![0.0; nb];
            for k in 0..nb {
                let tr_rinv: f64 = basis[k]
                    .iter()
                    .map(|&(i, j, w)| (w * rinv.get(j, i)).re)
                    .sum();
                let mut con = 0.0;
                for (c_idx, _) in constraints.iter().enumerate() {
                    con += basis_quads[c_idx][k] / s[c_idx];
                }
                grad[k] = obj_lin[k] + mu * tr_rinv - mu * con;
            }

            let mut hess = vec![0.0; nb * nb];
            for k in 0..nb {
                for l in k..nb {
                    let mut acc = C64::ZERO;
                    for &(i, j, w) in &basis[k] {
                        for &(p, q, v) in &basis[l] {
                            acc += w * v * rinv.get(q, i) * rinv.get(j, p);
                        }
                    }
                    let mut con = 0.0;
                    for (c_idx, _) in constraints.iter().enumerate() {
                        con +=
                            basis_quads[c_idx][k] * basis_quads[c_idx][l] / (s[c_idx] * s[c_idx]);
                    }
                    let v = -mu * (acc.re + con);
                    hess[k * nb + l] = v;
                    hess[l * nb + k] = v;
                }
            }

            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = match solve_real(hess, nb, rhs) {
                Some(st) => st,
                None => break,
            };
            let decrement: f64 = grad.iter().zip(&step).map(|(g, d)| g * d).sum();

            let value0 = {
                let mut v = 0.0;
                for k in 0..nb {
                    v += obj_lin[k] * coeff_of(&r, &basis[k]);
                }
                v + mu * rchol.log_det() + mu * s.iter().map(|x| x.ln()).sum::<f64>()
            };
            let mut alpha = 1.0f64;
            let mut moved = false;
            for _ in 0..40 {
                let mut r_try = r.clone();
                for (k, elem) in basis.iter().enumerate() {
                    let w = alpha * step[k];
                    if w == 0.0 {
                        continue;
                    }
                    for &(i, j, e) in elem {
                        r_try.set(i, j, r_try.get(i, j) + e * w);
                    }
                }
                if let Some(ch) = Cholesky::new(&r_try) {
                    let s_try = slacks(&r_try);
                    if s_try.iter().all(|&x| x > 0.0) {
                        let mut v = 0.0;
                        for k in 0..nb {
                            v += obj_lin[k] * coeff_of(&r_try, &basis[k]);
                        }
                        let val =
                            v + mu * ch.log_det() + mu * s_try.iter().map(|x| x.ln()).sum::<f64>();
                        if val > value0 - 1e-12 * (1.0 + value0.abs()) {
                            r = r_try;
                            moved = true;
                            break;
                        }
                    }
                }
                alpha *= 0.5;
            }
            if !moved || decrement.abs() < 1e-5 * mu {
                break;
            }
        }
    }
    Ok(r)
}

/// Coefficient of an orthonormal Hermitian basis element in `r`.
fn coeff_of(r: &ComplexMatrix, elem: &[(usize, usize, C64)]) -> f64 {
    elem.iter()
        .map(|&(i, j, w)| (w.conj() * r.get(i, j)).re)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_objective_saturates_constraints() {
        // B = I, constraints |e_k† R e_k| ≤ 1: optimum is R = I, value d.
        let d = 3;
        let b = ComplexMatrix::identity(d);
        let constraints: Vec<Vec<C64>> = (0..d)
            .map(|k| {
                let mut v = vec![C64::ZERO; d];
                v[k] = cx(1.0, 0.0);
                v
            })
            .collect();
        let r = max_linear_diag_sdp(&b, &constraints).unwrap();
        let value = b.matmul(&r).trace().re;
        assert!((value - d as f64).abs() < 1e-4, "value = {value}");
    }
}
