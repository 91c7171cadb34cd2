//! Feasibility engines shared by the witness search, the dual-norm
//! bisection, and the 2-summing computation.
//!
//! All engines maximize the smallest eigenvalue of an affine Hermitian family
//! over a convex parameter set. The concave maximization is run as a log-det
//! barrier with damped Newton steps; supergradients of `λ_min` provide
//! certified upper bounds on the unreachable side.

pub(crate) mod diag_sdp;
pub(crate) mod hermitian;
pub(crate) mod states;

use crate::linalg::C64;

/// Solve `A x = b` for a dense real square system by LU with partial
/// pivoting. `a` is row-major and is consumed. Returns `None` on a singular
/// pivot.
pub(crate) fn solve_real(mut a: Vec<f64>, n: usize, mut b: Vec<f64>) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[perm[col] * n + col].abs();
        for row in (col + 1)..n {
            let v = a[perm[row] * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best < 1e-300 {
            return None;
        }
        perm.swap(col, piv);
        let prow = perm[col];
        let pval = a[prow * n + col];
        for row in (col + 1)..n {
            let r = perm[row];
            let factor = a[r * n + col] / pval;
            if factor == 0.0 {
                continue;
            }
            a[r * n + col] = factor;
            for k in (col + 1)..n {
                a[r * n + k] -= factor * a[prow * n + k];
            }
            b[r] -= factor * b[prow];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let r = perm[col];
        let mut acc = b[r];
        for k in (col + 1)..n {
            acc -= a[r * n + k] * x[k];
        }
        x[col] = acc / a[r * n + col];
    }
    Some(x)
}

/// Orthonormal real basis of the Hermitian matrices of dimension `n`, as
/// sparse triplet lists `(row, col, weight)`.
pub(crate) fn hermitian_basis(n: usize) -> Vec<Vec<(usize, usize, C64)>> {
    let mut basis = Vec::with_capacity(n * n);
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    for i in 0..n {
        basis.push(vec![(i, i, C64::new(1.0, 0.0))]);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            basis.push(vec![
                (i, j, C64::new(inv_sqrt2, 0.0)),
                (j, i, C64::new(inv_sqrt2, 0.0)),
            ]);
            basis.push(vec![
                (i, j, C64::new(0.0, inv_sqrt2)),
                (j, i, C64::new(0.0, -inv_sqrt2)),
            ]);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let a = vec![2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let b = vec![8.0, -11.0, -3.0];
        let x = solve_real(a, 3, b).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
        assert!((x[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(solve_real(a, 2, vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn basis_spans_hermitians() {
        let basis = hermitian_basis(3);
        assert_eq!(basis.len(), 9);
    }
}
