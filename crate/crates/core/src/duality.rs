//! Dual norms by state domination.
//!
//! A bilinear form `T` on A×A satisfies `‖T‖* ≤ c` (for the wh, wh' or wH
//! norm) exactly when some state dominates it:
//! `|T(x,y)| ≤ c·p(xx*)^{1/2}·p(y*y)^{1/2}` (wh; the primed variants use
//! `p(x*x)`). With Gram matrices `G1, G2` of the state's quadratic forms the
//! domination over all x, y is equivalent to positive semidefiniteness of
//! the block matrix `[[c·conj(G1), M], [M†, c·G2]]` where `M` is the
//! coefficient matrix of `T` — a two-sided Cauchy-Schwarz criterion, checked
//! by one eigensolve. `dual_norm` bisects over `c` with the certified
//! feasibility engines of the solver module.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{
    cx, hermitian_eig, operator_norm, ComplexMatrix, HermitianMatrix, C64,
};
use crate::numrad::numerical_radius;
use crate::reps::{Space, TensorRep};
use crate::sampling::{random_c64, rng_from_seed, SeededRng};
use crate::solver::states::{
    bisect, density_feasibility, simplex_feasibility_active, DensityPattern, DensityProblem,
    EngineOpts, SimplexProblem, StateVec,
};

/// Feasibility tolerance on block eigenvalues (`tol_feas`).
pub const TOL_FEAS: f64 = 1e-8;
/// Default relative tolerance on the certified value.
pub const DUAL_TOL_DEFAULT: f64 = 1e-6;
/// Bisection step cap.
pub const BISECT_CAP: usize = 60;
/// Inner iteration cap per feasibility query.
pub const INNER_CAP: usize = 2000;
/// Matrix-algebra dimension cap for dual_norm (coefficient dim n² ≤ 36).
pub const DUAL_MATRIX_CAP: usize = 6;
/// Min-space dimension cap for dual_norm.
pub const DUAL_MIN_CAP: usize = 10;

/// Which tensor norm the dual is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "wh")]
    Wh,
    #[serde(rename = "whp")]
    Whp,
    #[serde(rename = "wH")]
    WH,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "wh" => Ok(Variant::Wh),
            "whp" => Ok(Variant::Whp),
            "wH" => Ok(Variant::WH),
            _ => Err(Error::InvalidInput(format!("unknown variant `{s}`"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Wh => "wh",
            Variant::Whp => "whp",
            Variant::WH => "wH",
        }
    }
}

/// A bilinear form `T(x, y) = vec(x)ᵀ · coeffs · vec(y)` over a space, with
/// row-major flattening of elements. The pairing orientation identifies
/// `⟨x, T(y)⟩` with `T(x ⊗ y)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BilinearForm {
    space: Space,
    coeffs: ComplexMatrix,
}

impl BilinearForm {
    pub fn new(space: Space, coeffs: ComplexMatrix) -> Result<Self, Error> {
        let d = space.coeff_dim();
        if coeffs.rows() != d || coeffs.cols() != d {
            return Err(Error::Shape(format!(
                "coefficient matrix is {}x{}, space expects {d}x{d}",
                coeffs.rows(),
                coeffs.cols()
            )));
        }
        Ok(Self { space, coeffs })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn coeffs(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    /// Evaluate on a pair of elements.
    pub fn evaluate(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> C64 {
        let d = self.space.coeff_dim();
        let xe = x.entries();
        let ye = y.entries();
        debug_assert_eq!(xe.len(), d);
        debug_assert_eq!(ye.len(), d);
        let mut acc = C64::ZERO;
        for p in 0..d {
            if xe[p] == C64::ZERO {
                continue;
            }
            let mut row = C64::ZERO;
            for q in 0..d {
                row += self.coeffs.get(p, q) * ye[q];
            }
            acc += xe[p] * row;
        }
        acc
    }

    /// Evaluate as a linear form on a represented tensor.
    pub fn evaluate_tensor(&self, rep: &TensorRep) -> Result<C64, Error> {
        if rep.space() != &self.space {
            return Err(Error::InvalidInput(
                "representation space does not match the form".into(),
            ));
        }
        Ok(rep
            .lefts()
            .iter()
            .zip(rep.rights())
            .map(|(x, y)| self.evaluate(x, y))
            .sum())
    }
}

/// A positivity certificate: density matrix over a matrix algebra or a
/// probability vector over a functional family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum State {
    Density { rho: HermitianMatrix },
    Prob { p: Vec<f64> },
}

impl State {
    /// Validate positivity and normalization against a space.
    pub fn validate(&self, space: &Space) -> Result<(), Error> {
        match (self, space) {
            (State::Density { rho }, Space::Matrix { n }) => {
                if rho.dim() != *n {
                    return Err(Error::Shape("density dimension mismatch".into()));
                }
                let (vals, _) = hermitian_eig(rho)?;
                if vals.first().copied().unwrap_or(0.0) < -crate::linalg::TOL_PSD {
                    return Err(Error::NotPsd {
                        lambda_min: vals[0],
                    });
                }
                if (rho.trace() - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidInput("density trace must be 1".into()));
                }
                Ok(())
            }
            (State::Prob { p }, Space::Min { family }) => {
                if p.len() != family.len() {
                    return Err(Error::Shape("probability length mismatch".into()));
                }
                if p.iter().any(|&x| x < -1e-12) {
                    return Err(Error::InvalidInput("negative probability".into()));
                }
                if (p.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidInput("probabilities must sum to 1".into()));
                }
                Ok(())
            }
            _ => Err(Error::InvalidInput("state kind does not match space".into())),
        }
    }
}

/// Certified dual norm value with its dominating state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualCert {
    pub value: f64,
    pub state: State,
    pub variant: Variant,
    /// λ_min of the domination block at `value·(1+tol)`.
    pub slack: f64,
}

/// Result of `dual_norm`: a certificate, or the honest interval when the
/// iteration caps ran out.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum DualOutcome {
    Converged(DualCert),
    NotConverged { c_lo: f64, c_hi: f64 },
}

impl DualOutcome {
    pub fn cert(&self) -> Option<&DualCert> {
        match self {
            DualOutcome::Converged(c) => Some(c),
            DualOutcome::NotConverged { .. } => None,
        }
    }
}

/// Options for the dual-norm engine.
#[derive(Debug, Clone)]
pub struct DualOptions {
    pub tol: f64,
    pub tol_feas: f64,
    pub bisect_cap: usize,
    pub inner_cap: usize,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            tol: DUAL_TOL_DEFAULT,
            tol_feas: TOL_FEAS,
            bisect_cap: BISECT_CAP,
            inner_cap: INNER_CAP,
        }
    }
}

/// Gram matrices of the state's quadratic forms: `vec(x)† G1 vec(x) = p(xx*)`
/// and `vec(y)† G2 vec(y) = p(y*y)` for the wh pairing; the wh' pairing uses
/// `p(x*x)` on the left. Over a Min space both sides coincide:
/// `G = Φ† diag(p) Φ`.
pub fn gram_pair(
    state: &State,
    space: &Space,
    variant: Variant,
) -> Result<(HermitianMatrix, HermitianMatrix), Error> {
    state.validate(space)?;
    match (state, space) {
        (State::Prob { p }, Space::Min { family }) => {
            let d = family.dim();
            let mut g = ComplexMatrix::zeros(d, d);
            for (k, &w) in p.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let f = family.functional(k);
                for i in 0..d {
                    for j in 0..d {
                        // v v† with v = conj(f): v_i conj(v_j) = conj(f_i) f_j.
                        g.set(i, j, g.get(i, j) + f[i].conj() * f[j] * w);
                    }
                }
            }
            let gh = HermitianMatrix::from_matrix(&g, 1e-9 * (1.0 + g.max_abs()))?;
            Ok((gh.clone(), gh))
        }
        (State::Density { rho }, Space::Matrix { n }) => {
            if variant == Variant::WH {
                return Err(Error::InvalidInput(
                    "the wH pairing lives on Min spaces".into(),
                ));
            }
            let id = ComplexMatrix::identity(*n);
            let rho_m = rho.to_matrix();
            let col = id.kron(&rho_m.transpose());
            let g2 = HermitianMatrix::from_matrix(&col, 1e-9 * (1.0 + col.max_abs()))?;
            let g1 = match variant {
                Variant::Wh => {
                    let row = rho_m.kron(&id);
                    HermitianMatrix::from_matrix(&row, 1e-9 * (1.0 + row.max_abs()))?
                }
                Variant::Whp => g2.clone(),
                Variant::WH => unreachable!(),
            };
            Ok((g1, g2))
        }
        _ => Err(Error::InvalidInput("state kind does not match space".into())),
    }
}

/// Assemble the domination block `[[c·conj(G1), M], [M†, c·G2]]`.
fn domination_block(
    t: &BilinearForm,
    g1: &HermitianMatrix,
    g2: &HermitianMatrix,
    c: f64,
) -> ComplexMatrix {
    let d = t.space().coeff_dim();
    let mut block = ComplexMatrix::zeros(2 * d, 2 * d);
    let g1c = g1.to_matrix().conjugate().scale(cx(c, 0.0));
    let g2s = g2.to_matrix().scale(cx(c, 0.0));
    block.set_block(0, 0, &g1c);
    block.set_block(d, d, &g2s);
    block.set_block(0, d, t.coeffs());
    block.set_block(d, 0, &t.coeffs().adjoint());
    block
}

/// Check `|T(x,y)| ≤ c·p(..)^{1/2}·p(..)^{1/2}` for all x, y via the block
/// criterion. Returns the pass flag (λ_min ≥ -tol_feas) and λ_min itself.
pub fn domination_check(
    t: &BilinearForm,
    state: &State,
    c: f64,
    variant: Variant,
) -> Result<(bool, f64), Error> {
    if c < 0.0 {
        return Err(Error::NegativeInput);
    }
    let (g1, g2) = gram_pair(state, t.space(), variant)?;
    let block = domination_block(t, &g1, &g2, c);
    let h = HermitianMatrix::from_matrix(&block, 1e-9 * (1.0 + block.max_abs()))?;
    let (vals, _) = hermitian_eig(&h)?;
    let lam = vals.first().copied().unwrap_or(0.0);
    Ok((lam >= -TOL_FEAS, lam))
}

fn embed_vector(d2: usize, offset: usize, v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::ZERO; d2];
    out[offset..offset + v.len()].copy_from_slice(v);
    out
}

/// Build the simplex feasibility problem for a Min-space form.
fn min_problem(t: &BilinearForm) -> (SimplexProblem, usize) {
    let family = match t.space() {
        Space::Min { family } => family.clone(),
        _ => unreachable!(),
    };
    let d = family.dim();
    let mut base = ComplexMatrix::zeros(2 * d, 2 * d);
    base.set_block(0, d, t.coeffs());
    base.set_block(d, 0, &t.coeffs().adjoint());
    let atoms = (0..family.len())
        .map(|k| {
            let f = family.functional(k);
            let fc: Vec<C64> = f.iter().map(|z| z.conj()).collect();
            vec![
                embed_vector(2 * d, 0, f),
                embed_vector(2 * d, d, &fc),
            ]
        })
        .collect();
    (SimplexProblem { base, atoms }, family.len())
}

fn density_problem(t: &BilinearForm, variant: Variant) -> DensityProblem {
    let n = match t.space() {
        Space::Matrix { n } => *n,
        _ => unreachable!(),
    };
    let d = n * n;
    let mut base = ComplexMatrix::zeros(2 * d, 2 * d);
    base.set_block(0, d, t.coeffs());
    base.set_block(d, 0, &t.coeffs().adjoint());
    let pattern = match variant {
        Variant::Wh => DensityPattern::RowColumn,
        Variant::Whp => DensityPattern::ColumnColumn,
        Variant::WH => unreachable!(),
    };
    DensityProblem { base, n, pattern }
}

fn uniform_state(t: &BilinearForm) -> State {
    match t.space() {
        Space::Min { family } => State::Prob {
            p: vec![1.0 / family.len() as f64; family.len()],
        },
        Space::Matrix { n } => State::Density {
            rho: HermitianMatrix::from_real_diag(&vec![1.0 / *n as f64; *n]),
        },
    }
}

/// Feasible starting scale: whiten by the uniform state's Gram.
fn initial_upper(t: &BilinearForm, variant: Variant) -> Result<f64, Error> {
    let state = uniform_state(t);
    let (g1, g2) = gram_pair(&state, t.space(), variant)?;
    let inv_sqrt = |g: &HermitianMatrix| -> Result<ComplexMatrix, Error> {
        let (vals, vecs) = hermitian_eig(g)?;
        let d = g.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for k in 0..d {
            let l = vals[k];
            if l <= 0.0 {
                return Err(Error::InvalidInput(
                    "uniform Gram is singular; the family does not span".into(),
                ));
            }
            let w = 1.0 / l.sqrt();
            for i in 0..d {
                for j in 0..d {
                    let v = out.get(i, j) + vecs.get(i, k) * vecs.get(j, k).conj() * w;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    };
    let w1 = inv_sqrt(&HermitianMatrix::from_matrix(
        &g1.to_matrix().conjugate(),
        1e-9,
    )?)?;
    let w2 = inv_sqrt(&g2)?;
    Ok(operator_norm(&w1.matmul(t.coeffs()).matmul(&w2)))
}

/// Certified dual norm against the chosen variant, with defaults.
pub fn dual_norm(t: &BilinearForm, variant: Variant, tol: f64) -> Result<DualOutcome, Error> {
    dual_norm_with(
        t,
        variant,
        &DualOptions {
            tol,
            ..DualOptions::default()
        },
    )
}

/// Certified dual norm with explicit engine options.
pub fn dual_norm_with(
    t: &BilinearForm,
    variant: Variant,
    opts: &DualOptions,
) -> Result<DualOutcome, Error> {
    match t.space() {
        Space::Matrix { n } => {
            if variant == Variant::WH {
                return Err(Error::InvalidInput(
                    "the wH pairing lives on Min spaces".into(),
                ));
            }
            if *n > DUAL_MATRIX_CAP {
                return Err(Error::DimensionCap {
                    dim: *n,
                    cap: DUAL_MATRIX_CAP,
                });
            }
        }
        Space::Min { family } => {
            if family.dim() > DUAL_MIN_CAP {
                return Err(Error::DimensionCap {
                    dim: family.dim(),
                    cap: DUAL_MIN_CAP,
                });
            }
        }
    }

    let scale = t.coeffs().max_abs();
    if scale == 0.0 {
        let state = uniform_state(t);
        return Ok(DualOutcome::Converged(DualCert {
            value: 0.0,
            state,
            variant,
            slack: 0.0,
        }));
    }

    let engine = EngineOpts {
        tol_feas: opts.tol_feas,
        max_inner: opts.inner_cap,
        fw_iters: 12,
    };
    let c_hi0 = initial_upper(t, variant)? * (1.0 + 1e-9) + 1e-14;

    let outcome = match t.space() {
        Space::Min { .. } => {
            let (prob, m) = min_problem(t);
            let state0 = StateVec::Prob(vec![1.0 / m as f64; m]);
            bisect(
                |c, warm| {
                    let w = match warm {
                        StateVec::Prob(p) => Some(p.as_slice()),
                        _ => None,
                    };
                    simplex_feasibility_active(&prob, c, w, &engine)
                },
                0.0,
                c_hi0,
                state0,
                opts.tol,
                opts.bisect_cap,
            )?
        }
        Space::Matrix { n } => {
            let prob = density_problem(t, variant);
            let rho0 = ComplexMatrix::identity(*n).scale(cx(1.0 / *n as f64, 0.0));
            bisect(
                |c, warm| {
                    let w = match warm {
                        StateVec::Density(r) => Some(r.to_matrix()),
                        _ => None,
                    };
                    density_feasibility(&prob, c, w.as_ref(), &engine)
                },
                0.0,
                c_hi0,
                StateVec::Density(
                    HermitianMatrix::from_matrix(&rho0, 1e-12).expect("uniform density"),
                ),
                opts.tol,
                opts.bisect_cap,
            )?
        }
    };

    if !outcome.converged {
        return Ok(DualOutcome::NotConverged {
            c_lo: outcome.c_lo,
            c_hi: outcome.c_hi,
        });
    }

    let state = match outcome.state {
        StateVec::Prob(p) => {
            let total: f64 = p.iter().sum();
            State::Prob {
                p: p.iter().map(|&x| (x / total).max(0.0)).collect(),
            }
        }
        StateVec::Density(rho) => State::Density { rho },
    };
    let value = outcome.c_hi;
    let (_, slack) = domination_check(t, &state, value * (1.0 + opts.tol), variant)?;
    Ok(DualOutcome::Converged(DualCert {
        value,
        state,
        variant,
        slack,
    }))
}

/// Sampled lower bound on the dual norm via the numerical radius of `T⊗α`:
/// the maximum over feasible tuples of
/// `|Σ_ij ⟨x_i*, T(x_j)⟩ α_ij| / w(α)`, where tuples are normalized to
/// `sup_f Σ_i |f(x_i)|² ≤ 1`. Every sample is a feasible point of the
/// supremum, so the result never exceeds the dual norm.
pub fn w_tensor_lower(
    t: &BilinearForm,
    alpha: &ComplexMatrix,
    trials: usize,
    seed: u64,
) -> Result<f64, Error> {
    let family = match t.space() {
        Space::Min { family } => family.clone(),
        _ => {
            return Err(Error::InvalidInput(
                "w_tensor_lower needs a Min-space form".into(),
            ))
        }
    };
    if !alpha.is_square() {
        return Err(Error::Shape("alpha must be square".into()));
    }
    let w_alpha = numerical_radius(alpha)?;
    if w_alpha == 0.0 {
        if t.coeffs().max_abs() == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::ZeroRadius);
    }
    let n = alpha.rows();
    let d = family.dim();

    let value_of = |xs: &[Vec<C64>]| -> f64 {
        // sup_f Σ_i |f(x_i)|².
        let mut sup = 0.0f64;
        for k in 0..family.len() {
            let e: f64 = xs
                .iter()
                .map(|x| family.evaluate(k, x).norm_sqr())
                .sum();
            sup = sup.max(e);
        }
        if sup <= 1e-300 {
            return 0.0;
        }
        let rows: Vec<ComplexMatrix> = xs
            .iter()
            .map(|x| ComplexMatrix::new(1, d, x.clone()).expect("finite"))
            .collect();
        let mut q = C64::ZERO;
        for i in 0..n {
            for j in 0..n {
                let a = alpha.get(i, j);
                if a == C64::ZERO {
                    continue;
                }
                q += t.evaluate(&rows[i], &rows[j]).conj() * a;
            }
        }
        q.norm() / (sup * w_alpha)
    };

    let mut rng = rng_from_seed(seed);
    let mut best = 0.0f64;
    let mut best_xs: Option<Vec<Vec<C64>>> = None;

    // Structured starts: coordinate tuples.
    for start in 0..d.min(4) {
        let xs: Vec<Vec<C64>> = (0..n)
            .map(|i| {
                let mut v = vec![C64::ZERO; d];
                v[(start + i) % d] = cx(1.0, 0.0);
                v
            })
            .collect();
        let v = value_of(&xs);
        if v > best {
            best = v;
            best_xs = Some(xs);
        }
    }

    for _ in 0..trials {
        let xs: Vec<Vec<C64>> = (0..n)
            .map(|_| (0..d).map(|_| random_c64(&mut rng)).collect())
            .collect();
        let v = value_of(&xs);
        if v > best {
            best = v;
            best_xs = Some(xs);
        }
    }

    // Local ascent around the best sample.
    if let Some(mut xs) = best_xs {
        let mut sigma = 0.4;
        let mut stall = 0;
        for _ in 0..120 {
            let cand = perturb(&xs, sigma, &mut rng);
            let v = value_of(&cand);
            if v > best {
                best = v;
                xs = cand;
                stall = 0;
            } else {
                stall += 1;
                if stall >= 6 {
                    sigma *= 0.6;
                    stall = 0;
                    if sigma < 1e-6 {
                        break;
                    }
                }
            }
        }
    }
    Ok(best)
}

fn perturb(xs: &[Vec<C64>], sigma: f64, rng: &mut SeededRng) -> Vec<Vec<C64>> {
    xs.iter()
        .map(|x| {
            x.iter()
                .map(|&z| z + random_c64(rng) * sigma)
                .collect()
        })
        .collect()
}


#[cfg(test)]
mod engine_probes {
    use super::*;
    use crate::minspace::FunctionalFamily;
    use crate::sampling::{random_matrix, rng_from_seed};
    use std::sync::Arc;

    #[test]
    fn dual_norm_random_l1_3_probe() {
        let family = Arc::new(FunctionalFamily::l1_sign(3).unwrap());
        let mut rng = rng_from_seed(42);
        let start = std::time::Instant::now();
        let mut values = Vec::new();
        for _ in 0..5 {
            let coeffs = random_matrix(&mut rng, 3, 3);
            let t = BilinearForm::new(
                Space::Min {
                    family: family.clone(),
                },
                coeffs,
            )
            .unwrap();
            match dual_norm(&t, Variant::WH, 1e-6).unwrap() {
                DualOutcome::Converged(cert) => values.push(cert.value),
                DualOutcome::NotConverged { c_lo, c_hi } => {
                    panic!("not converged: [{c_lo}, {c_hi}]")
                }
            }
        }
        eprintln!("5 dual_norms in {:?}: {:?}", start.elapsed(), values);
    }

    #[test]
    fn dual_norm_matrix_probe() {
        let mut rng = rng_from_seed(43);
        for n in [2usize, 3] {
            let start = std::time::Instant::now();
            let coeffs = random_matrix(&mut rng, n * n, n * n);
            let t = BilinearForm::new(Space::Matrix { n }, coeffs).unwrap();
            let out = dual_norm(&t, Variant::Wh, 1e-6).unwrap();
            match out {
                DualOutcome::Converged(cert) => {
                    eprintln!("n={n}: value {:.6} in {:?}", cert.value, start.elapsed())
                }
                DualOutcome::NotConverged { c_lo, c_hi } => {
                    panic!("n={n} not converged: [{c_lo}, {c_hi}]")
                }
            }
        }
    }
}
