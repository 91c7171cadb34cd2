//! Explicit square factorizations `T = a*ba` / `T = aᵗba` through Hilbert
//! space, built from a dominating state by the GNS construction, plus
//! 2-summing norms and column cb-norm lower bounds.

use serde::{Deserialize, Serialize};

use crate::duality::{
    domination_check, dual_norm, DualCert, DualOutcome, State, Variant, BilinearForm,
};
use crate::error::Error;
use crate::linalg::{
    cx, hermitian_eig, operator_norm, pseudo_inverse, ComplexMatrix, HermitianMatrix, C64,
};
use crate::minspace::{min_matrix_norm, FunctionalFamily, MinVector};
use crate::reps::Space;
use crate::solver::diag_sdp::max_linear_diag_sdp;
use crate::solver::states::{bisect, simplex_feasibility_active, EngineOpts, SimplexProblem, StateVec};

/// State weights below this are pruned from the GNS support.
pub const GNS_PRUNE: f64 = 1e-12;
/// Cap on the matrix level of the cb-norm search.
pub const CB_LEVEL_CAP: usize = 8;

/// How the left factor enters the reconstruction: `a*` is the conjugate
/// transpose of a's matrix, `aᵗ` the plain transpose. The two differ exactly
/// by entrywise conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Adjoint,
    Transpose,
}

/// Explicit factorization of a bilinear form through ℓ²_k.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Factorization {
    /// The map into the Hilbert space, as a k×D matrix on flattened elements.
    pub a: ComplexMatrix,
    /// The middle operator on ℓ²_k.
    pub b: ComplexMatrix,
    pub kind: FactorKind,
    /// cb/π₂-type norm of `a` (‖ξ‖ for GNS maps; recomputed π₂ for the
    /// Banach pipeline).
    pub a_norm: f64,
    pub b_norm: f64,
    /// Max-abs gap between T's coefficients and the reconstruction.
    pub residual: f64,
}

/// GNS data behind a factorization: the ambient orthonormal basis of the
/// representation space and the state weights actually used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GnsData {
    pub state: State,
    /// Orthonormal columns mapping abstract K-coordinates into the ambient
    /// carrier (weighted evaluations / Gram coordinates).
    pub basis: ComplexMatrix,
    pub weights: Vec<f64>,
}

/// Build the GNS evaluation map `a` (k×D on flattened elements) for a state:
/// `‖a·vec(z)‖² = p(z*z)`. Returns the map with its GNS data.
pub fn gns_map(state: &State, space: &Space) -> Result<(ComplexMatrix, GnsData), Error> {
    state.validate(space)?;
    match (state, space) {
        (State::Prob { p }, Space::Min { family }) => {
            let d = family.dim();
            let support: Vec<usize> = (0..p.len()).filter(|&k| p[k] >= GNS_PRUNE).collect();
            let ms = support.len();
            let mut a0 = ComplexMatrix::zeros(ms, d);
            for (row, &k) in support.iter().enumerate() {
                let w = p[k].sqrt();
                for j in 0..d {
                    a0.set(row, j, family.functional(k)[j] * w);
                }
            }
            // Orthonormal basis of the column span of a0.
            let gram = a0.matmul(&a0.adjoint());
            let gh = HermitianMatrix::from_matrix(&gram, 1e-9 * (1.0 + gram.max_abs()))?;
            let (vals, vecs) = hermitian_eig(&gh)?;
            let top = vals.last().copied().unwrap_or(0.0);
            let keep: Vec<usize> = (0..ms)
                .rev()
                .filter(|&k| vals[k] > 1e-24 * top.max(1e-300))
                .collect();
            let mut q = ComplexMatrix::zeros(ms, keep.len());
            for (col, &k) in keep.iter().enumerate() {
                for i in 0..ms {
                    q.set(i, col, vecs.get(i, k));
                }
            }
            let a = q.adjoint().matmul(&a0);
            let weights: Vec<f64> = support.iter().map(|&k| p[k]).collect();
            Ok((
                a,
                GnsData {
                    state: state.clone(),
                    basis: q,
                    weights,
                },
            ))
        }
        (State::Density { rho }, Space::Matrix { n }) => {
            let d = n * n;
            // Column Gram of the state: vec(z)† (I⊗ρᵗ) vec(z) = p(z*z).
            let gram = ComplexMatrix::identity(*n).kron(&rho.to_matrix().transpose());
            let gh = HermitianMatrix::from_matrix(&gram, 1e-9 * (1.0 + gram.max_abs()))?;
            let (vals, vecs) = hermitian_eig(&gh)?;
            let keep: Vec<usize> = (0..d).rev().filter(|&k| vals[k] >= GNS_PRUNE).collect();
            let mut a = ComplexMatrix::zeros(keep.len(), d);
            let mut basis = ComplexMatrix::zeros(d, keep.len());
            for (row, &k) in keep.iter().enumerate() {
                let w = vals[k].sqrt();
                for j in 0..d {
                    a.set(row, j, vecs.get(j, k).conj() * w);
                    basis.set(j, row, vecs.get(j, k));
                }
            }
            // Kept state mass comes from ρ's own spectrum; the Gram spectrum
            // repeats each ρ-eigenvalue n times.
            let (rvals, _) = hermitian_eig(rho)?;
            let weights: Vec<f64> = rvals.into_iter().rev().filter(|&v| v >= GNS_PRUNE).collect();
            Ok((
                a,
                GnsData {
                    state: state.clone(),
                    basis,
                    weights,
                },
            ))
        }
        _ => Err(Error::InvalidInput("state kind does not match space".into())),
    }
}

/// Reconstruct T's coefficient matrix from a factorization.
pub fn reconstruct(f: &Factorization, space: &Space) -> ComplexMatrix {
    match f.kind {
        FactorKind::Transpose => f.a.transpose().matmul(&f.b).matmul(&f.a),
        FactorKind::Adjoint => {
            let core = f.a.adjoint().matmul(&f.b).matmul(&f.a);
            match space {
                // Commutative adjoints conjugate the function; the vec index
                // order is unchanged.
                Space::Min { .. } => core,
                // Matrix adjoints also transpose: permute the row index by
                // the vec transposition.
                Space::Matrix { n } => {
                    let d = n * n;
                    let mut out = ComplexMatrix::zeros(d, d);
                    for i in 0..*n {
                        for j in 0..*n {
                            let p = i * n + j;
                            let sp = j * n + i;
                            for q in 0..d {
                                out.set(p, q, core.get(sp, q));
                            }
                        }
                    }
                    out
                }
            }
        }
    }
}

/// Read-only re-check of a factorization against a form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorReport {
    pub residual: f64,
    pub a_op_norm: f64,
    pub b_op_norm: f64,
    /// `a_norm² · ‖b‖` with the stored a_norm and the recomputed ‖b‖.
    pub product_bound: f64,
    pub kind: FactorKind,
}

pub fn verify_factorization(t: &BilinearForm, f: &Factorization) -> Result<FactorReport, Error> {
    let d = t.space().coeff_dim();
    if f.a.cols() != d || f.b.rows() != f.b.cols() || f.b.rows() != f.a.rows() {
        return Err(Error::Shape("factorization shapes are inconsistent".into()));
    }
    let rec = reconstruct(f, t.space());
    let residual = rec.max_abs_diff(t.coeffs());
    let b_op_norm = operator_norm(&f.b);
    Ok(FactorReport {
        residual,
        a_op_norm: operator_norm(&f.a),
        b_op_norm,
        product_bound: f.a_norm * f.a_norm * b_op_norm,
        kind: f.kind,
    })
}

/// Factor a form through the GNS space of a certified dominating state:
/// `a(z) = π(z)ξ` in coordinates, `b` solved on the range of `a` by least
/// squares and extended by zero. The kind follows the certificate's variant
/// (wh → adjoint, wh'/wH → transpose).
pub fn gns_factorize(t: &BilinearForm, cert: &DualCert) -> Result<Factorization, Error> {
    let (ok, lam) = domination_check(t, &cert.state, cert.value * (1.0 + 1e-6), cert.variant)?;
    if !ok {
        return Err(Error::RejectedCertificate { lambda_min: lam });
    }
    let kind = match cert.variant {
        Variant::Wh => FactorKind::Adjoint,
        Variant::Whp | Variant::WH => FactorKind::Transpose,
    };
    let d = t.space().coeff_dim();
    if t.coeffs().max_abs() == 0.0 {
        return Ok(Factorization {
            a: ComplexMatrix::zeros(0, d),
            b: ComplexMatrix::zeros(0, 0),
            kind,
            a_norm: 0.0,
            b_norm: 0.0,
            residual: 0.0,
        });
    }

    let (a, gns) = gns_map(&cert.state, t.space())?;
    if a.rows() == 0 {
        return Err(Error::InconsistentCertificate);
    }

    // Least squares for b on the range of a, honoring the kind:
    //   transpose: C = aᵀ b a      → b = pinv(a)ᵀ · C · pinv(a)
    //   adjoint:   C = S a† b a    → b = pinv(a)† · (S·C) · pinv(a)
    let pinv = pseudo_inverse(&a, 1e-12);
    let b = match kind {
        FactorKind::Transpose => pinv.transpose().matmul(t.coeffs()).matmul(&pinv),
        FactorKind::Adjoint => {
            let target = match t.space() {
                Space::Min { .. } => t.coeffs().clone(),
                Space::Matrix { n } => {
                    // Apply the vec transposition to the rows of C.
                    let mut out = ComplexMatrix::zeros(d, d);
                    for i in 0..*n {
                        for j in 0..*n {
                            for q in 0..d {
                                out.set(i * n + j, q, t.coeffs().get(j * n + i, q));
                            }
                        }
                    }
                    out
                }
            };
            pinv.adjoint().matmul(&target).matmul(&pinv)
        }
    };

    let a_norm = gns.weights.iter().sum::<f64>().sqrt();
    let b_norm = operator_norm(&b);
    let mut f = Factorization {
        a,
        b,
        kind,
        a_norm,
        b_norm,
        residual: 0.0,
    };
    f.residual = reconstruct(&f, t.space()).max_abs_diff(t.coeffs());
    Ok(f)
}

/// 2-summing norm of `a : X → ℓ²_k` against a family: the smallest C such
/// that some probability vector μ satisfies
/// `C²·Φ†diag(μ)Φ - a†a ⪰ 0`, found by bisection over the same feasibility
/// engine as the dual norms. Returns the witness measure.
pub fn pietsch_pi2(
    a: &ComplexMatrix,
    family: &FunctionalFamily,
) -> Result<(f64, Vec<f64>), Error> {
    if a.cols() != family.dim() {
        return Err(Error::Shape("map domain does not match the family".into()));
    }
    let m = family.len();
    if a.max_abs() == 0.0 {
        return Ok((0.0, vec![1.0 / m as f64; m]));
    }
    let d = family.dim();
    let gram = a.adjoint().matmul(a);
    let base = gram.scale(cx(-1.0, 0.0));
    let atoms: Vec<Vec<Vec<C64>>> = (0..m)
        .map(|k| {
            let v: Vec<C64> = family.functional(k).iter().map(|z| z.conj()).collect();
            vec![v]
        })
        .collect();
    let prob = SimplexProblem { base, atoms };

    // Feasible start from the uniform measure: C² = ‖G_u^{-1/2} a†a G_u^{-1/2}‖.
    let phi = family.evaluation_matrix();
    let gu = phi
        .adjoint()
        .matmul(&phi)
        .scale(cx(1.0 / m as f64, 0.0));
    let gh = HermitianMatrix::from_matrix(&gu, 1e-9 * (1.0 + gu.max_abs()))?;
    let (vals, vecs) = hermitian_eig(&gh)?;
    if vals.first().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::Unbounded);
    }
    let mut inv_sqrt = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let w = 1.0 / vals[k].sqrt();
        for i in 0..d {
            for j in 0..d {
                let v = inv_sqrt.get(i, j) + vecs.get(i, k) * vecs.get(j, k).conj() * w;
                inv_sqrt.set(i, j, v);
            }
        }
    }
    let c2_u = operator_norm(&inv_sqrt.matmul(&gram).matmul(&inv_sqrt));
    let c_hi0 = c2_u.sqrt() * (1.0 + 1e-9) + 1e-14;

    let engine = EngineOpts::default();
    let outcome = bisect(
        |c, warm| {
            let w = match warm {
                StateVec::Prob(p) => Some(p.as_slice()),
                _ => None,
            };
            simplex_feasibility_active(&prob, c * c, w, &engine)
        },
        0.0,
        c_hi0,
        StateVec::Prob(vec![1.0 / m as f64; m]),
        1e-6,
        80,
    )?;
    if !outcome.converged {
        return Err(Error::SolverStall("2-summing bisection did not converge".into()));
    }
    let mu = match outcome.state {
        StateVec::Prob(p) => {
            let total: f64 = p.iter().sum();
            p.iter().map(|&x| (x / total).max(0.0)).collect()
        }
        _ => unreachable!(),
    };
    Ok((outcome.c_hi, mu))
}

/// Ratio `‖[a(x_ij)]‖_{M(H_c)} / ‖[x_ij]‖_min` for a matrix of elements;
/// the numerator stacks `a`-images columnwise.
fn cb_ratio(
    a: &ComplexMatrix,
    family: &FunctionalFamily,
    xs: &[Vec<Vec<C64>>],
) -> Result<f64, Error> {
    let rows = xs.len();
    let cols = xs[0].len();
    let k = a.rows();
    let mut stacked = ComplexMatrix::zeros(rows * k, cols);
    for (i, row) in xs.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let ax = a.matvec(x);
            for (s, &v) in ax.iter().enumerate() {
                stacked.set(i * k + s, j, v);
            }
        }
    }
    let numer = operator_norm(&stacked);
    let elems: Vec<Vec<MinVector>> = xs
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| MinVector::new(x.clone()).expect("finite"))
                .collect()
        })
        .collect();
    let denom = min_matrix_norm(&elems, family)?;
    if denom <= 1e-300 {
        return Ok(0.0);
    }
    Ok(numer / denom)
}

/// Lower bound on the column cb-norm of `a : Min(X) → ℓ²_k` from matrices of
/// elements up to the given level: seeded random inputs with local ascent,
/// plus a column witness extracted from the Pietsch dual SDP.
pub fn cb_lower_column(
    a: &ComplexMatrix,
    family: &FunctionalFamily,
    level: usize,
    seed: u64,
) -> Result<f64, Error> {
    if level == 0 || level > CB_LEVEL_CAP {
        return Err(Error::DimensionCap {
            dim: level,
            cap: CB_LEVEL_CAP,
        });
    }
    if a.cols() != family.dim() {
        return Err(Error::Shape("map domain does not match the family".into()));
    }
    if a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let d = family.dim();
    let mut best = 0.0f64;

    // Structured column witness from the dual SDP
    // max tr(a†a·R) s.t. R ⪰ 0, (ΦRΦ†)_kk ≤ 1.
    let gram = a.adjoint().matmul(a);
    let constraints: Vec<Vec<C64>> = (0..family.len())
        .map(|k| family.functional(k).iter().map(|z| z.conj()).collect())
        .collect();
    if let Ok(r) = max_linear_diag_sdp(&gram, &constraints) {
        let rh = HermitianMatrix::from_matrix(&r, 1e-8 * (1.0 + r.max_abs()))?;
        let (vals, vecs) = hermitian_eig(&rh)?;
        let mut cols: Vec<Vec<C64>> = Vec::new();
        for k in (0..d).rev().take(level) {
            if vals[k] <= 1e-14 * vals[d - 1].max(1e-300) {
                continue;
            }
            let w = vals[k].sqrt();
            cols.push((0..d).map(|i| vecs.get(i, k) * w).collect());
        }
        if !cols.is_empty() {
            let ell = cols.len();
            let mut xs: Vec<Vec<Vec<C64>>> = vec![vec![vec![C64::ZERO; d]; ell]; ell];
            for (i, c) in cols.iter().enumerate() {
                xs[i][0] = c.clone();
            }
            best = best.max(cb_ratio(a, family, &xs)?);
        }
    }

    // Seeded random matrices with local ascent.
    let mut rng = crate::sampling::rng_from_seed(seed);
    let mut best_xs: Option<Vec<Vec<Vec<C64>>>> = None;
    for _ in 0..24 {
        let xs: Vec<Vec<Vec<C64>>> = (0..level)
            .map(|_| {
                (0..level)
                    .map(|_| (0..d).map(|_| crate::sampling::random_c64(&mut rng)).collect())
                    .collect()
            })
            .collect();
        let v = cb_ratio(a, family, &xs)?;
        if v > best {
            best = v;
            best_xs = Some(xs);
        }
    }
    if let Some(mut xs) = best_xs {
        let mut sigma = 0.4;
        let mut stall = 0;
        for _ in 0..80 {
            let cand: Vec<Vec<Vec<C64>>> = xs
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| {
                            x.iter()
                                .map(|&z| z + crate::sampling::random_c64(&mut rng) * sigma)
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let v = cb_ratio(a, family, &cand)?;
            if v > best {
                best = v;
                xs = cand;
                stall = 0;
            } else {
                stall += 1;
                if stall >= 5 {
                    sigma *= 0.6;
                    stall = 0;
                    if sigma < 1e-5 {
                        break;
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Full Banach-space pipeline: certify the wH dual norm, factor through the
/// GNS space (transpose kind), then recompute π₂(a) with its own Pietsch
/// certificate rather than trusting the GNS bound.
pub fn banach_factorize(t: &BilinearForm, tol: f64) -> Result<Factorization, Error> {
    let family = match t.space() {
        Space::Min { family } => family.clone(),
        _ => {
            return Err(Error::InvalidInput(
                "banach_factorize needs a Min-space form".into(),
            ))
        }
    };
    let cert = match dual_norm(t, Variant::WH, tol)? {
        DualOutcome::Converged(c) => c,
        DualOutcome::NotConverged { c_lo, c_hi } => {
            return Err(Error::SolverStall(format!(
                "dual norm stuck in [{c_lo}, {c_hi}]"
            )))
        }
    };
    let mut f = gns_factorize(t, &cert)?;
    if f.a.rows() > 0 {
        let (pi2, _) = pietsch_pi2(&f.a, &family)?;
        f.a_norm = pi2;
    }
    Ok(f)
}
