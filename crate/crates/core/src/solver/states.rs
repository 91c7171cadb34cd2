//! Max-λ_min engines over state sets: the probability simplex over a
//! functional family and the density matrices of a matrix algebra.
//!
//! Both engines decide, for a fixed scale `c`, whether
//! `max_state λ_min(base + c·Gram(state))` reaches `-tol_feas`. A found state
//! certifies the feasible side; supergradients of `λ_min` at the final
//! iterate certify the infeasible side: for any unit eigenvector `v` of the
//! current matrix, `λ_min(A(q)) ≤ v†A(q)v` is affine in `q`, so its maximum
//! over the state set bounds the objective from above.
//!
//! The search itself runs a short Frank-Wolfe phase (supergradient steps onto
//! extreme states) followed by a log-det barrier Newton polish, which is what
//! actually reaches the 1e-9 accuracy the bisection needs near the boundary.

use crate::error::Error;
use crate::linalg::{cx, hermitian_eig, Cholesky, ComplexMatrix, HermitianMatrix, C64};
use crate::solver::{hermitian_basis, solve_real};

/// Feasibility tolerance on λ_min.
pub const TOL_FEAS: f64 = 1e-8;

/// Verdict of one feasibility query. Every branch carries the engine's final
/// state so callers can warm-start and re-screen; λ/upper are diagnostic.
#[derive(Debug, Clone)]
#[allow(dead_code)]
pub(crate) enum Verdict {
    Feasible { state: StateVec, lambda: f64 },
    Infeasible { upper: f64, state: StateVec },
    Unresolved { upper: f64, state: StateVec },
}

/// State in whichever parametrization the engine used.
#[derive(Debug, Clone)]
pub(crate) enum StateVec {
    Prob(Vec<f64>),
    Density(HermitianMatrix),
}

/// Options shared by the engines.
#[derive(Debug, Clone)]
pub(crate) struct EngineOpts {
    pub tol_feas: f64,
    /// Total iteration budget (eigensolves + Newton steps) per query.
    pub max_inner: usize,
    pub fw_iters: usize,
}

impl Default for EngineOpts {
    fn default() -> Self {
        Self {
            tol_feas: TOL_FEAS,
            max_inner: 2000,
            fw_iters: 12,
        }
    }
}

// ---------------------------------------------------------------------------
// Simplex engine
// ---------------------------------------------------------------------------

/// `A(c, p) = base + c · Σ_k p_k · Σ_b v_{k,b} v_{k,b}†` with the rank-one
/// pieces sitting at diagonal offsets of the block matrix.
pub(crate) struct SimplexProblem {
    pub base: ComplexMatrix,
    /// Per coordinate: embedded rank-one vectors (already offset into the
    /// block index space).
    pub atoms: Vec<Vec<Vec<C64>>>,
}

impl SimplexProblem {
    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    fn assemble(&self, c: f64, p: &[f64]) -> ComplexMatrix {
        let d = self.dim();
        let mut a = self.base.clone();
        for (k, atom) in self.atoms.iter().enumerate() {
            let w = c * p[k];
            if w == 0.0 {
                continue;
            }
            for v in atom {
                for i in 0..d {
                    if v[i] == C64::ZERO {
                        continue;
                    }
                    for j in 0..d {
                        a.set(i, j, a.get(i, j) + v[i] * v[j].conj() * w);
                    }
                }
            }
        }
        a
    }

    /// Supergradient coordinates `s_k = c·Σ_b |v_{k,b}† u|²` for a unit
    /// vector `u`.
    fn supergrad(&self, c: f64, u: &[C64]) -> Vec<f64> {
        self.atoms
            .iter()
            .map(|atom| {
                c * atom
                    .iter()
                    .map(|v| {
                        v.iter()
                            .zip(u)
                            .map(|(a, b)| a.conj() * b)
                            .sum::<C64>()
                            .norm_sqr()
                    })
                    .sum::<f64>()
            })
            .collect()
    }
}

/// Lowest eigenpairs of the assembled block matrix.
struct LowEigs {
    lambdas: Vec<f64>,
    vectors: Vec<Vec<C64>>,
}

fn low_eigs(a: &ComplexMatrix) -> Result<LowEigs, Error> {
    let h = HermitianMatrix::from_matrix(a, 1e-8 * (1.0 + a.max_abs()))?;
    let (vals, vecs) = hermitian_eig(&h)?;
    let take = vals.len().min(4);
    Ok(LowEigs {
        lambdas: vals[..take].to_vec(),
        vectors: (0..take).map(|k| vecs.column(k)).collect(),
    })
}

/// Upper bound on `max_q λ_min(A(c, q))` over the probability simplex from a
/// convex combination of low eigenvectors: for any weights w,
/// `λ_min(A(q)) ≤ Σ_i w_i·v_i†A(q)v_i`, affine in q, so its simplex maximum
/// `Σ w_i λ_i + max_k Σ w_i s_i[k] - Σ w_i ⟨s_i, p⟩` is a certified bound.
/// Starts with single eigenvectors and escalates to pair and triple mixes
/// only while the bound fails to clear `goal` (degenerate optima need the
/// mixing).
fn combined_simplex_upper(
    lambdas: &[f64],
    supers: &[Vec<f64>],
    p: &[f64],
    goal: f64,
) -> f64 {
    let r = lambdas.len();
    let bound_of = |w: &[f64]| -> f64 {
        let m = supers[0].len();
        let mut smax = f64::NEG_INFINITY;
        for k in 0..m {
            let mut acc = 0.0;
            for i in 0..w.len() {
                acc += w[i] * supers[i][k];
            }
            smax = smax.max(acc);
        }
        let mut base = 0.0;
        for i in 0..w.len() {
            let sp: f64 = supers[i].iter().zip(p).map(|(a, b)| a * b).sum();
            base += w[i] * (lambdas[i] - sp);
        }
        base + smax
    };

    let mut best = f64::INFINITY;
    for i in 0..r {
        let mut e = vec![0.0; r];
        e[i] = 1.0;
        best = best.min(bound_of(&e));
    }
    if best < goal || r < 2 {
        return best;
    }
    // Pair mixes by golden section (the bound is convex in the weights).
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    for i in 0..r {
        for j in (i + 1)..r {
            let eval = |t: f64| -> f64 {
                let mut w = vec![0.0; r];
                w[i] = t;
                w[j] = 1.0 - t;
                bound_of(&w)
            };
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut x1 = hi - golden * (hi - lo);
            let mut x2 = lo + golden * (hi - lo);
            let mut f1 = eval(x1);
            let mut f2 = eval(x2);
            for _ in 0..40 {
                if f1 > f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + golden * (hi - lo);
                    f2 = eval(x2);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - golden * (hi - lo);
                    f1 = eval(x1);
                }
            }
            best = best.min(f1.min(f2));
        }
    }
    if best < goal || r < 3 {
        return best;
    }
    // Coarse barycentric grid over triples with two refinement rounds.
    for i in 0..r {
        for j in (i + 1)..r {
            for k in (j + 1)..r {
                let (mut ci, mut cj) = (1.0 / 3.0, 1.0 / 3.0);
                let mut h = 1.0 / 3.0;
                for _round in 0..3 {
                    let mut best_local = (f64::INFINITY, ci, cj);
                    let steps = 8;
                    for a in 0..=steps {
                        for b in 0..=(steps - a) {
                            let wi = (ci - h + 2.0 * h * a as f64 / steps as f64).clamp(0.0, 1.0);
                            let wj = (cj - h + 2.0 * h * b as f64 / steps as f64).clamp(0.0, 1.0);
                            if wi + wj > 1.0 {
                                continue;
                            }
                            let mut w = vec![0.0; r];
                            w[i] = wi;
                            w[j] = wj;
                            w[k] = 1.0 - wi - wj;
                            let v = bound_of(&w);
                            if v < best_local.0 {
                                best_local = (v, wi, wj);
                            }
                        }
                    }
                    best = best.min(best_local.0);
                    ci = best_local.1;
                    cj = best_local.2;
                    h /= 3.0;
                }
            }
        }
    }
    best
}

pub(crate) fn simplex_feasibility(
    prob: &SimplexProblem,
    c: f64,
    warm: Option<&[f64]>,
    opts: &EngineOpts,
) -> Result<Verdict, Error> {
    let m = prob.len();
    let mut budget = opts.max_inner as isize;
    let mut p: Vec<f64> = match warm {
        Some(w) if w.len() == m => {
            let mut q: Vec<f64> = w.iter().map(|&x| x.max(1e-10)).collect();
            let s: f64 = q.iter().sum();
            q.iter_mut().for_each(|x| *x /= s);
            q
        }
        _ => vec![1.0 / m as f64; m],
    };
    let mut best_upper = f64::INFINITY;
    let mut best_feas: Option<(Vec<f64>, f64)> = None;

    let goal = -opts.tol_feas;
    let evaluate = |p: &[f64], budget: &mut isize| -> Result<(f64, Vec<f64>, f64), Error> {
        *budget -= 1;
        let a = prob.assemble(c, p);
        let low = low_eigs(&a)?;
        let supers: Vec<Vec<f64>> = low.vectors.iter().map(|u| prob.supergrad(c, u)).collect();
        let upper = combined_simplex_upper(&low.lambdas, &supers, p, goal);
        Ok((low.lambdas[0], supers.into_iter().next().unwrap(), upper))
    };

    // Frank-Wolfe phase: supergradient steps onto extreme states.
    let gammas = [1.0, 0.5, 0.25, 0.1, 0.03, 0.01];
    for _ in 0..opts.fw_iters {
        if budget <= 0 {
            break;
        }
        let (lam, grad, upper) = evaluate(&p, &mut budget)?;
        best_upper = best_upper.min(upper);
        if lam >= -opts.tol_feas {
            return Ok(Verdict::Feasible {
                state: StateVec::Prob(p),
                lambda: lam,
            });
        }
        if best_upper < -opts.tol_feas {
            return Ok(Verdict::Infeasible {
                upper: best_upper,
                state: StateVec::Prob(p),
            });
        }
        let k_star = argmax(&grad);
        let mut improved = false;
        for &g in &gammas {
            let mut q: Vec<f64> = p.iter().map(|&x| x * (1.0 - g)).collect();
            q[k_star] += g;
            budget -= 1;
            let a = prob.assemble(c, &q);
            let lam_q = low_eigs(&a)?.lambdas[0];
            if lam_q > lam + 1e-14 {
                p = q;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }

    // Barrier-Newton polish on the simplex; a stuck path is retried from
    // the uniform center before giving up.
    let mut polish_start = p.clone();
    for attempt in 0..2 {
        if let Some((lam, upper)) = simplex_newton(prob, c, &mut polish_start, &mut budget)? {
            best_upper = best_upper.min(upper);
            if lam >= -opts.tol_feas {
                best_feas = Some((polish_start.clone(), lam));
            }
        }
        let decided =
            best_feas.is_some() || best_upper < -opts.tol_feas || budget <= 0;
        if decided || attempt == 1 {
            break;
        }
        polish_start = vec![1.0 / m as f64; m];
    }
    p = polish_start;

    if let Some((state, lambda)) = best_feas {
        return Ok(Verdict::Feasible {
            state: StateVec::Prob(state),
            lambda,
        });
    }
    if best_upper < -opts.tol_feas {
        return Ok(Verdict::Infeasible {
            upper: best_upper,
            state: StateVec::Prob(p),
        });
    }
    Ok(Verdict::Unresolved {
        upper: best_upper,
        state: StateVec::Prob(p),
    })
}

/// Active-set wrapper: for large families, solve on a growing subset of
/// coordinates and certify against the full family by supergradient
/// screening at the subset optimum. A feasible subset state is feasible for
/// the full problem as-is; infeasibility needs the full-family upper bound.
pub(crate) fn simplex_feasibility_active(
    prob: &SimplexProblem,
    c: f64,
    warm: Option<&[f64]>,
    opts: &EngineOpts,
) -> Result<Verdict, Error> {
    let m = prob.len();
    const DIRECT_CAP: usize = 96;
    const GROW: usize = 48;
    if m <= DIRECT_CAP {
        return simplex_feasibility(prob, c, warm, opts);
    }

    let full_p: Vec<f64> = match warm {
        Some(w) if w.len() == m => w.to_vec(),
        _ => vec![1.0 / m as f64; m],
    };
    // Initial screening at the warm state.
    let a = prob.assemble(c, &full_p);
    let low0 = low_eigs(&a)?;
    let s0 = prob.supergrad(c, &low0.vectors[0]);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| s0[j].partial_cmp(&s0[i]).unwrap());
    let mut subset: Vec<usize> = order.iter().take(DIRECT_CAP / 2).copied().collect();
    for (k, &w) in full_p.iter().enumerate() {
        if w > 1e-9 && !subset.contains(&k) {
            subset.push(k);
        }
    }
    subset.sort_unstable();
    let supers0: Vec<Vec<f64>> = low0.vectors.iter().map(|u| prob.supergrad(c, u)).collect();
    let mut best_upper =
        combined_simplex_upper(&low0.lambdas, &supers0, &full_p, -opts.tol_feas);

    for _round in 0..16 {
        let sub_atoms: Vec<Vec<Vec<C64>>> =
            subset.iter().map(|&k| prob.atoms[k].clone()).collect();
        let sub_prob = SimplexProblem {
            base: prob.base.clone(),
            atoms: sub_atoms,
        };
        let sub_warm: Vec<f64> = subset.iter().map(|&k| full_p[k].max(1e-9)).collect();
        let verdict = simplex_feasibility(&sub_prob, c, Some(&sub_warm), opts)?;

        let lift = |psub: &[f64]| -> Vec<f64> {
            let mut full = vec![0.0; m];
            for (i, &k) in subset.iter().enumerate() {
                full[k] = psub[i];
            }
            full
        };
        let psub = match &verdict {
            Verdict::Feasible { state, lambda } => {
                if let StateVec::Prob(p) = state {
                    return Ok(Verdict::Feasible {
                        state: StateVec::Prob(lift(p)),
                        lambda: *lambda,
                    });
                }
                unreachable!()
            }
            Verdict::Infeasible { state, .. } | Verdict::Unresolved { state, .. } => match state {
                StateVec::Prob(p) => lift(p),
                _ => unreachable!(),
            },
        };

        // Screen against the full family at the subset optimum.
        let a = prob.assemble(c, &psub);
        let low = low_eigs(&a)?;
        let lam = low.lambdas[0];
        let supers: Vec<Vec<f64>> = low.vectors.iter().map(|u| prob.supergrad(c, u)).collect();
        let upper = combined_simplex_upper(&low.lambdas, &supers, &psub, -opts.tol_feas);
        let s_first = supers.into_iter().next().unwrap();
        best_upper = best_upper.min(upper);
        if lam >= -opts.tol_feas {
            return Ok(Verdict::Feasible {
                state: StateVec::Prob(psub),
                lambda: lam,
            });
        }
        if best_upper < -opts.tol_feas {
            return Ok(Verdict::Infeasible {
                upper: best_upper,
                state: StateVec::Prob(psub),
            });
        }

        // Grow the subset with the strongest outside improvers.
        let sp: f64 = s_first.iter().zip(&psub).map(|(a, b)| a * b).sum();
        let mut outside: Vec<usize> = (0..m)
            .filter(|k| !subset.contains(k) && s_first[*k] > sp + 1e-15)
            .collect();
        outside.sort_by(|&i, &j| s_first[j].partial_cmp(&s_first[i]).unwrap());
        if outside.is_empty() {
            return Ok(Verdict::Unresolved {
                upper: best_upper,
                state: StateVec::Prob(psub),
            });
        }
        subset.extend(outside.into_iter().take(GROW));
        subset.sort_unstable();
        subset.dedup();
    }
    Ok(Verdict::Unresolved {
        upper: best_upper,
        state: StateVec::Prob(vec![1.0 / m as f64; m]),
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    let _ = v[best];
    best
}

/// Equality-constrained barrier Newton for
/// `max t + μ(logdet(A(c,p) - tI) + Σ log p_k)` s.t. `Σ p = 1`.
/// Returns the final `(λ_min, certified upper bound)` at the polished state.
fn simplex_newton(
    prob: &SimplexProblem,
    c: f64,
    p: &mut Vec<f64>,
    budget: &mut isize,
) -> Result<Option<(f64, f64)>, Error> {
    let m = prob.len();
    let d = prob.dim();
    let scale = 1.0 + prob.base.max_abs() + c;

    // Strictly interior start.
    for x in p.iter_mut() {
        *x = x.max(1e-9);
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);

    let a0 = prob.assemble(c, p);
    let mut lam = low_eigs(&a0)?.lambdas[0];
    let mut t = lam - 0.1 * scale;
    let mut nu = 0.0;

    let dim = m + 2; // t, p, multiplier
    let mut stage_bound = f64::INFINITY;
    let mut mu = 0.05 * scale;
    let mu_end = 1e-13 * scale;
    while mu > mu_end && *budget > 0 {
        mu *= 0.15;
        for _newton in 0..40 {
            if *budget <= 0 {
                break;
            }
            *budget -= 1;
            let mut s_mat = prob.assemble(c, p);
            for i in 0..d {
                s_mat.set(i, i, s_mat.get(i, i) - cx(t, 0.0));
            }
            let chol = match Cholesky::new(&s_mat) {
                Some(ch) => ch,
                None => return Ok(None),
            };
            let q = chol.inverse();
            let q2 = q.matmul(&q);

            // Cached Q·v and Q²-quadratics per atom vector.
            let mut tr_qa = vec![0.0; m]; // tr(Q A_k)
            let mut tr_q2a = vec![0.0; m]; // tr(Q² A_k)
            let mut qv: Vec<Vec<Vec<C64>>> = Vec::with_capacity(m);
            for (k, atom) in prob.atoms.iter().enumerate() {
                let mut per_atom = Vec::with_capacity(atom.len());
                for v in atom {
                    let z = q.matvec(v);
                    tr_qa[k] += c * v
                        .iter()
                        .zip(&z)
                        .map(|(a, b)| (a.conj() * b).re)
                        .sum::<f64>();
                    tr_q2a[k] += c * z.iter().map(|x| x.norm_sqr()).sum::<f64>();
                    per_atom.push(z);
                }
                qv.push(per_atom);
            }

            // Residuals of the KKT system.
            let mut r = vec![0.0; dim];
            r[0] = 1.0 - mu * q.trace().re;
            for k in 0..m {
                r[k + 1] = mu * tr_qa[k] + mu / p[k] - nu;
            }
            r[dim - 1] = 1.0 - p.iter().sum::<f64>();

            // Jacobian.
            let mut jac = vec![0.0; dim * dim];
            jac[0] = -mu * q2.trace().re;
            for k in 0..m {
                let v = mu * tr_q2a[k];
                jac[k + 1] = v;
                jac[(k + 1) * dim] = v;
            }
            for k in 0..m {
                for l in k..m {
                    // tr(Q A_k Q A_l) via cached Q·v inner products.
                    let mut acc = 0.0;
                    for vl in &prob.atoms[l] {
                        for zk in &qv[k] {
                            acc += vl
                                .iter()
                                .zip(zk)
                                .map(|(a, b)| a.conj() * b)
                                .sum::<C64>()
                                .norm_sqr();
                        }
                    }
                    let mut v = -mu * c * c * acc;
                    if k == l {
                        v -= mu / (p[k] * p[k]);
                    }
                    jac[(k + 1) * dim + (l + 1)] = v;
                    jac[(l + 1) * dim + (k + 1)] = v;
                }
            }
            for k in 0..m {
                jac[(k + 1) * dim + (dim - 1)] = -1.0;
                jac[(dim - 1) * dim + (k + 1)] = -1.0;
            }

            let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
            let step = match solve_real(jac, dim, rhs) {
                Some(s) => s,
                None => break,
            };

            // Fraction to the boundary on p, then backtrack on feasibility.
            let mut alpha: f64 = 1.0;
            for k in 0..m {
                let dp = step[k + 1];
                if dp < 0.0 {
                    alpha = alpha.min(-0.95 * p[k] / dp);
                }
            }
            alpha = alpha.min(1.0);
            let res0: f64 = r.iter().map(|x| x * x).sum::<f64>();
            let mut accepted = false;
            for _ in 0..30 {
                let t_try = t + alpha * step[0];
                let p_try: Vec<f64> = (0..m).map(|k| p[k] + alpha * step[k + 1]).collect();
                let nu_try = nu + alpha * step[dim - 1];
                if p_try.iter().all(|&x| x > 0.0) {
                    let mut s_try = prob.assemble(c, &p_try);
                    for i in 0..d {
                        s_try.set(i, i, s_try.get(i, i) - cx(t_try, 0.0));
                    }
                    if let Some(ch) = Cholesky::new(&s_try) {
                        // Accept on KKT residual decrease.
                        let q_try = ch.inverse();
                        let mut r_try = 1.0 - mu * q_try.trace().re;
                        let mut res1 = r_try * r_try;
                        for k in 0..m {
                            let mut tr = 0.0;
                            for v in &prob.atoms[k] {
                                let z = q_try.matvec(v);
                                tr += c * v
                                    .iter()
                                    .zip(&z)
                                    .map(|(a, b)| (a.conj() * b).re)
                                    .sum::<f64>();
                            }
                            r_try = mu * tr + mu / p_try[k] - nu_try;
                            res1 += r_try * r_try;
                        }
                        let rsum = 1.0 - p_try.iter().sum::<f64>();
                        res1 += rsum * rsum;
                        if res1 <= res0 * (1.0 - 0.01 * alpha) + 1e-30 {
                            t = t_try;
                            *p = p_try;
                            nu = nu_try;
                            accepted = true;
                            break;
                        }
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
            let res: f64 = {
                let tail: f64 = r.iter().map(|x| x * x).sum();
                tail.sqrt()
            };
            if res < 1e-3 * mu {
                break;
            }
        }
        // Harvest the dual certificate while the path is still well
        // centered; late stages can break down numerically.
        if let Some(b) = simplex_dual_bound(prob, c, p, t) {
            stage_bound = stage_bound.min(b);
        }
    }

    // Final certified values at the polished state. Two candidate upper
    // bounds: convex mixes of low eigenvectors, and the central-path dual
    // state W = S⁻¹/tr(S⁻¹), which is tight to O(μ) when the path converged.
    let a = prob.assemble(c, p);
    let low = low_eigs(&a)?;
    lam = low.lambdas[0];
    let supers: Vec<Vec<f64>> = low.vectors.iter().map(|u| prob.supergrad(c, u)).collect();
    let mut upper = combined_simplex_upper(&low.lambdas, &supers, p, f64::NEG_INFINITY);
    upper = upper.min(stage_bound);
    Ok(Some((lam, upper)))
}


/// Dual upper bound on `max_q λ_min(A(c, q))` over the simplex from the
/// trace-normalized inverse slack `W = S⁻¹/tr(S⁻¹)` at `(p, t)`:
/// `λ_min(A(q)) ≤ ⟨W, base⟩ + c·max_k Σ_b v† W v`.
fn simplex_dual_bound(prob: &SimplexProblem, c: f64, p: &[f64], t: f64) -> Option<f64> {
    let d = prob.dim();
    let mut s_mat = prob.assemble(c, p);
    for i in 0..d {
        s_mat.set(i, i, s_mat.get(i, i) - cx(t, 0.0));
    }
    let ch = Cholesky::new(&s_mat)?;
    let q = ch.inverse();
    let trace = q.trace().re;
    if !(trace > 0.0) || !trace.is_finite() {
        return None;
    }
    let base_term = frob_inner(&prob.base, &q) / trace;
    let mut worst = f64::NEG_INFINITY;
    for atom in &prob.atoms {
        let mut s_k = 0.0;
        for v in atom {
            let qv = q.matvec(v);
            s_k += v
                .iter()
                .zip(&qv)
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>();
        }
        worst = worst.max(c * s_k / trace);
    }
    let bound = base_term + worst;
    bound.is_finite().then_some(bound)
}

/// Density analogue of [`simplex_dual_bound`]:
/// `λ_min(A(σ)) ≤ ⟨W, base⟩ + c·λ_max(Ĝ(W))` with the contracted gradient Ĝ.
fn density_dual_bound(
    prob: &DensityProblem,
    c: f64,
    basis: &[Vec<(usize, usize, C64)>],
    lifted: &[Vec<(usize, usize, C64)>],
    rho: &ComplexMatrix,
    t: f64,
) -> Result<Option<f64>, Error> {
    let bd = prob.block_dim();
    let mut s_mat = prob.assemble(c, rho);
    for i in 0..bd {
        s_mat.set(i, i, s_mat.get(i, i) - cx(t, 0.0));
    }
    let ch = match Cholesky::new(&s_mat) {
        Some(ch) => ch,
        None => return Ok(None),
    };
    let q = ch.inverse();
    let trace = q.trace().re;
    if !(trace > 0.0) || !trace.is_finite() {
        return Ok(None);
    }
    let base_term = frob_inner(&prob.base, &q) / trace;
    let n = prob.n;
    let mut ghat = ComplexMatrix::zeros(n, n);
    for (elem, lift) in basis.iter().zip(lifted) {
        let coeff: f64 = lift
            .iter()
            .map(|&(i, j, w)| (w * q.get(j, i)).re)
            .sum::<f64>()
            / trace;
        for &(i, j, w) in elem {
            ghat.set(i, j, ghat.get(i, j) + w * coeff);
        }
    }
    let gh = HermitianMatrix::from_matrix(&ghat, 1e-8 * (1.0 + ghat.max_abs()))?;
    let (gvals, _) = hermitian_eig(&gh)?;
    let gmax = gvals.last().copied().unwrap_or(0.0);
    let bound = base_term + c * gmax;
    Ok(bound.is_finite().then_some(bound))
}

/// Real Frobenius pairing `tr(W·B)` of Hermitian matrices.
fn frob_inner(b: &ComplexMatrix, w: &ComplexMatrix) -> f64 {
    let n = b.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (w.get(i, j) * b.get(j, i)).re;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Density-matrix engine
// ---------------------------------------------------------------------------

/// Which Gram pattern each diagonal block of `A(c, ρ)` uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum DensityPattern {
    /// Top block `conj(ρ)⊗I`, bottom block `I⊗ρᵗ` (the wh pairing).
    RowColumn,
    /// Top block `I⊗ρ`, bottom block `I⊗ρᵗ` (the wh' pairing).
    ColumnColumn,
}

pub(crate) struct DensityProblem {
    pub base: ComplexMatrix,
    /// Dimension n of the algebra; the block matrix has size 2n².
    pub n: usize,
    pub pattern: DensityPattern,
}

impl DensityProblem {
    fn block_dim(&self) -> usize {
        2 * self.n * self.n
    }

    /// Triplets of the block-space image of a Hermitian basis element.
    fn lift(&self, elem: &[(usize, usize, C64)]) -> Vec<(usize, usize, C64)> {
        let n = self.n;
        let d = n * n;
        let mut out = Vec::with_capacity(2 * n * elem.len());
        for &(a, b, w) in elem {
            match self.pattern {
                DensityPattern::RowColumn => {
                    // conj(E) ⊗ I at the top.
                    for k in 0..n {
                        out.push((a * n + k, b * n + k, w.conj()));
                    }
                }
                DensityPattern::ColumnColumn => {
                    // I ⊗ E at the top.
                    for k in 0..n {
                        out.push((k * n + a, k * n + b, w));
                    }
                }
            }
            // I ⊗ Eᵗ at the bottom for both patterns.
            for k in 0..n {
                out.push((d + k * n + b, d + k * n + a, w));
            }
        }
        out
    }

    fn assemble(&self, c: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let d = n * n;
        let mut a = self.base.clone();
        let id = ComplexMatrix::identity(n);
        let top = match self.pattern {
            DensityPattern::RowColumn => rho.conjugate().kron(&id),
            DensityPattern::ColumnColumn => id.kron(rho),
        };
        let bottom = id.kron(&rho.transpose());
        for i in 0..d {
            for j in 0..d {
                a.set(i, j, a.get(i, j) + top.get(i, j) * c);
                a.set(d + i, d + j, a.get(d + i, d + j) + bottom.get(i, j) * c);
            }
        }
        a
    }

    /// Supergradient matrix `G` with `d/dρ λ_min · E = tr(G E)` from a unit
    /// vector of the block matrix.
    fn supergrad_matrix(
        &self,
        c: f64,
        basis: &[Vec<(usize, usize, C64)>],
        lifted: &[Vec<(usize, usize, C64)>],
        u: &[C64],
    ) -> ComplexMatrix {
        let n = self.n;
        let mut g = ComplexMatrix::zeros(n, n);
        for (elem, lift) in basis.iter().zip(lifted) {
            let s: f64 = lift
                .iter()
                .map(|&(i, j, w)| (u[i].conj() * w * u[j]).re)
                .sum::<f64>()
                * c;
            for &(i, j, w) in elem {
                g.set(i, j, g.get(i, j) + w * s);
            }
        }
        g
    }
}

/// Certified upper bound over density states from convex mixes of the low
/// eigenvectors' supergradient matrices:
/// `λ_min(A(σ)) ≤ Σ w_i λ_i + λ_max(G_w) - tr(G_w ρ)` for `G_w = Σ w_i G_i`.
fn combined_density_upper(
    lambdas: &[f64],
    grads: &[ComplexMatrix],
    rho: &ComplexMatrix,
    goal: f64,
) -> Result<f64, Error> {
    let r = lambdas.len();
    let bound_of = |w: &[f64]| -> Result<f64, Error> {
        let n = grads[0].rows();
        let mut g = ComplexMatrix::zeros(n, n);
        let mut base = 0.0;
        for i in 0..w.len() {
            if w[i] == 0.0 {
                continue;
            }
            g = g.add(&grads[i].scale(cx(w[i], 0.0)));
            base += w[i] * lambdas[i];
        }
        let h = HermitianMatrix::from_matrix(&g, 1e-8 * (1.0 + g.max_abs()))?;
        let (vals, _) = hermitian_eig(&h)?;
        let gmax = vals.last().copied().unwrap_or(0.0);
        Ok(base + gmax - g.matmul(rho).trace().re)
    };

    let mut best = f64::INFINITY;
    for i in 0..r {
        let mut e = vec![0.0; r];
        e[i] = 1.0;
        best = best.min(bound_of(&e)?);
    }
    if best < goal || r < 2 {
        return Ok(best);
    }
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    for i in 0..r {
        for j in (i + 1)..r {
            let eval = |t: f64| -> Result<f64, Error> {
                let mut w = vec![0.0; r];
                w[i] = t;
                w[j] = 1.0 - t;
                bound_of(&w)
            };
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut x1 = hi - golden * (hi - lo);
            let mut x2 = lo + golden * (hi - lo);
            let mut f1 = eval(x1)?;
            let mut f2 = eval(x2)?;
            for _ in 0..32 {
                if f1 > f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + golden * (hi - lo);
                    f2 = eval(x2)?;
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - golden * (hi - lo);
                    f1 = eval(x1)?;
                }
            }
            best = best.min(f1.min(f2));
        }
    }
    if best < goal || r < 3 {
        return Ok(best);
    }
    // Barycentric grid over triples with refinement.
    for i in 0..r {
        for j in (i + 1)..r {
            for k in (j + 1)..r {
                let (mut ci, mut cj) = (1.0 / 3.0, 1.0 / 3.0);
                let mut h = 1.0 / 3.0;
                for _round in 0..3 {
                    let mut best_local = (f64::INFINITY, ci, cj);
                    let steps = 6;
                    for a in 0..=steps {
                        for b in 0..=(steps - a) {
                            let wi = (ci - h + 2.0 * h * a as f64 / steps as f64).clamp(0.0, 1.0);
                            let wj = (cj - h + 2.0 * h * b as f64 / steps as f64).clamp(0.0, 1.0);
                            if wi + wj > 1.0 {
                                continue;
                            }
                            let mut w = vec![0.0; r];
                            w[i] = wi;
                            w[j] = wj;
                            w[k] = 1.0 - wi - wj;
                            let v = bound_of(&w)?;
                            if v < best_local.0 {
                                best_local = (v, wi, wj);
                            }
                        }
                    }
                    best = best.min(best_local.0);
                    ci = best_local.1;
                    cj = best_local.2;
                    h /= 3.0;
                }
            }
        }
    }
    Ok(best)
}

pub(crate) fn density_feasibility(
    prob: &DensityProblem,
    c: f64,
    warm: Option<&ComplexMatrix>,
    opts: &EngineOpts,
) -> Result<Verdict, Error> {
    let n = prob.n;
    let basis = hermitian_basis(n);
    let lifted: Vec<Vec<(usize, usize, C64)>> = basis.iter().map(|e| prob.lift(e)).collect();
    let mut budget = opts.max_inner as isize;

    let mut rho = match warm {
        Some(r) if r.rows() == n => regularize_density(r),
        _ => ComplexMatrix::identity(n).scale(cx(1.0 / n as f64, 0.0)),
    };
    let mut best_upper = f64::INFINITY;

    // Frank-Wolfe phase onto rank-one extreme states.
    let gammas = [1.0, 0.5, 0.25, 0.1, 0.03];
    for _ in 0..opts.fw_iters {
        if budget <= 0 {
            break;
        }
        budget -= 1;
        let a = prob.assemble(c, &rho);
        let low = low_eigs(&a)?;
        let lam = low.lambdas[0];
        let grads: Vec<ComplexMatrix> = low
            .vectors
            .iter()
            .map(|u| prob.supergrad_matrix(c, &basis, &lifted, u))
            .collect();
        best_upper =
            best_upper.min(combined_density_upper(&low.lambdas, &grads, &rho, -opts.tol_feas)?);
        let grad = Some(grads.into_iter().next().unwrap());
        if lam >= -opts.tol_feas {
            return Ok(Verdict::Feasible {
                state: StateVec::Density(HermitianMatrix::from_matrix(&rho, 1e-8)?),
                lambda: lam,
            });
        }
        if best_upper < -opts.tol_feas {
            return Ok(Verdict::Infeasible {
                upper: best_upper,
                state: StateVec::Density(HermitianMatrix::from_matrix(
                    &rho,
                    1e-8 * (1.0 + rho.max_abs()),
                )?),
            });
        }
        // Extreme state: projector onto the top eigenvector of the gradient.
        let g = grad.expect("gradient computed");
        let gh = HermitianMatrix::from_matrix(&g, 1e-8 * (1.0 + g.max_abs()))?;
        let (gvals, gvecs) = hermitian_eig(&gh)?;
        let top = gvecs.column(gvals.len() - 1);
        let mut vertex = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                vertex.set(i, j, top[i] * top[j].conj());
            }
        }
        let mut improved = false;
        for &gstep in &gammas {
            let cand = rho.scale(cx(1.0 - gstep, 0.0)).add(&vertex.scale(cx(gstep, 0.0)));
            budget -= 1;
            let lam_q = low_eigs(&prob.assemble(c, &cand))?.lambdas[0];
            if lam_q > lam + 1e-14 {
                rho = cand;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }

    // Barrier-Newton polish over the density manifold; a stuck path is
    // retried from the maximally mixed state before giving up.
    for attempt in 0..2 {
        if let Some((lam, upper)) = density_newton(prob, c, &basis, &lifted, &mut rho, &mut budget)? {
            best_upper = best_upper.min(upper);
            if lam >= -opts.tol_feas {
                return Ok(Verdict::Feasible {
                    state: StateVec::Density(HermitianMatrix::from_matrix(
                        &rho,
                        1e-8 * (1.0 + rho.max_abs()),
                    )?),
                    lambda: lam,
                });
            }
        }
        if best_upper < -opts.tol_feas || budget <= 0 || attempt == 1 {
            break;
        }
        rho = ComplexMatrix::identity(n).scale(cx(1.0 / n as f64, 0.0));
    }
    let final_state = StateVec::Density(HermitianMatrix::from_matrix(
        &rho,
        1e-8 * (1.0 + rho.max_abs()),
    )?);
    if best_upper < -opts.tol_feas {
        return Ok(Verdict::Infeasible {
            upper: best_upper,
            state: final_state,
        });
    }
    Ok(Verdict::Unresolved {
        upper: best_upper,
        state: final_state,
    })
}

fn regularize_density(r: &ComplexMatrix) -> ComplexMatrix {
    let n = r.rows();
    let eps = 1e-7;
    let reg = r
        .scale(cx(1.0 - eps * n as f64, 0.0))
        .add(&ComplexMatrix::identity(n).scale(cx(eps, 0.0)));
    let tr = reg.trace().re;
    reg.scale(cx(1.0 / tr, 0.0))
}

#[allow(clippy::too_many_arguments)]
fn density_newton(
    prob: &DensityProblem,
    c: f64,
    basis: &[Vec<(usize, usize, C64)>],
    lifted: &[Vec<(usize, usize, C64)>],
    rho: &mut ComplexMatrix,
    budget: &mut isize,
) -> Result<Option<(f64, f64)>, Error> {
    let nb = basis.len();
    let bd = prob.block_dim();
    let scale = 1.0 + prob.base.max_abs() + c;

    *rho = regularize_density(rho);
    let mut lam = low_eigs(&prob.assemble(c, rho))?.lambdas[0];
    let mut t = lam - 0.1 * scale;
    let mut nu = 0.0;
    let dim = nb + 2;

    let tr_q_elem = |q: &ComplexMatrix, elem: &[(usize, usize, C64)]| -> f64 {
        elem.iter()
            .map(|&(a, b, w)| (w * q.get(b, a)).re)
            .sum::<f64>()
    };

    let mut stage_bound = f64::INFINITY;
    let mut mu = 0.05 * scale;
    let mu_end = 1e-13 * scale;
    while mu > mu_end && *budget > 0 {
        mu *= 0.15;
        for _newton in 0..40 {
            if *budget <= 0 {
                break;
            }
            *budget -= 1;
            let mut s_mat = prob.assemble(c, rho);
            for i in 0..bd {
                s_mat.set(i, i, s_mat.get(i, i) - cx(t, 0.0));
            }
            let (chol, rchol) = match (Cholesky::new(&s_mat), Cholesky::new(rho)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(None),
            };
            let q = chol.inverse();
            let q2 = q.matmul(&q);
            let rinv = rchol.inverse();

            let mut r = vec![0.0; dim];
            r[0] = 1.0 - mu * q.trace().re;
            let mut traces = vec![(0.0, 0.0); nb]; // (tr(QΔ), tr(Q²Δ))
            for k in 0..nb {
                let t1: f64 = lifted[k]
                    .iter()
                    .map(|&(a, b, w)| (w * q.get(b, a)).re)
                    .sum::<f64>()
                    * c;
                let t2: f64 = lifted[k]
                    .iter()
                    .map(|&(a, b, w)| (w * q2.get(b, a)).re)
                    .sum::<f64>()
                    * c;
                traces[k] = (t1, t2);
                let tr_rho = tr_q_elem(&rinv, &basis[k]);
                let tr_e: f64 = basis[k]
                    .iter()
                    .filter(|&&(a, b, _)| a == b)
                    .map(|&(_, _, w)| w.re)
                    .sum();
                r[k + 1] = mu * t1 + mu * tr_rho - nu * tr_e;
            }
            r[dim - 1] = 1.0 - rho.trace().re;

            let mut jac = vec![0.0; dim * dim];
            jac[0] = -mu * q2.trace().re;
            for k in 0..nb {
                let v = mu * traces[k].1;
                jac[k + 1] = v;
                jac[(k + 1) * dim] = v;
            }
            for k in 0..nb {
                for l in k..nb {
                    // tr(Q Δ_k Q Δ_l) and tr(ρ⁻¹E_k ρ⁻¹E_l) from triplets.
                    let mut acc = C64::ZERO;
                    for &(a, b, w) in &lifted[k] {
                        for &(cc, dd, v) in &lifted[l] {
                            acc += w * v * q.get(dd, a) * q.get(b, cc);
                        }
                    }
                    let mut acc_r = C64::ZERO;
                    for &(a, b, w) in &basis[k] {
                        for &(cc, dd, v) in &basis[l] {
                            acc_r += w * v * rinv.get(dd, a) * rinv.get(b, cc);
                        }
                    }
                    let v = -mu * (c * c * acc.re + acc_r.re);
                    jac[(k + 1) * dim + (l + 1)] = v;
                    jac[(l + 1) * dim + (k + 1)] = v;
                }
            }
            for k in 0..nb {
                let tr_e: f64 = basis[k]
                    .iter()
                    .filter(|&&(a, b, _)| a == b)
                    .map(|&(_, _, w)| w.re)
                    .sum();
                jac[(k + 1) * dim + (dim - 1)] = -tr_e;
                jac[(dim - 1) * dim + (k + 1)] = -tr_e;
            }

            let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
            let step = match solve_real(jac, dim, rhs) {
                Some(s) => s,
                None => break,
            };

            let res0: f64 = r.iter().map(|x| x * x).sum();
            let mut alpha: f64 = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let t_try = t + alpha * step[0];
                let nu_try = nu + alpha * step[dim - 1];
                let mut rho_try = rho.clone();
                for (k, elem) in basis.iter().enumerate() {
                    let w = alpha * step[k + 1];
                    if w == 0.0 {
                        continue;
                    }
                    for &(i, j, e) in elem {
                        rho_try.set(i, j, rho_try.get(i, j) + e * w);
                    }
                }
                let mut s_try = prob.assemble(c, &rho_try);
                for i in 0..bd {
                    s_try.set(i, i, s_try.get(i, i) - cx(t_try, 0.0));
                }
                if let (Some(ch), Some(rch)) = (Cholesky::new(&s_try), Cholesky::new(&rho_try)) {
                    let q_try = ch.inverse();
                    let rinv_try = rch.inverse();
                    let mut res1 = {
                        let v = 1.0 - mu * q_try.trace().re;
                        v * v
                    };
                    for k in 0..nb {
                        let t1: f64 = lifted[k]
                            .iter()
                            .map(|&(a, b, w)| (w * q_try.get(b, a)).re)
                            .sum::<f64>()
                            * c;
                        let tr_rho = tr_q_elem(&rinv_try, &basis[k]);
                        let tr_e: f64 = basis[k]
                            .iter()
                            .filter(|&&(a, b, _)| a == b)
                            .map(|&(_, _, w)| w.re)
                            .sum();
                        let v = mu * t1 + mu * tr_rho - nu_try * tr_e;
                        res1 += v * v;
                    }
                    let v = 1.0 - rho_try.trace().re;
                    res1 += v * v;
                    if res1 <= res0 * (1.0 - 0.01 * alpha) + 1e-30 {
                        t = t_try;
                        nu = nu_try;
                        *rho = rho_try;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
            if res0.sqrt() < 1e-3 * mu {
                break;
            }
        }
        if let Some(b) = density_dual_bound(prob, c, basis, lifted, rho, t)? {
            stage_bound = stage_bound.min(b);
        }
    }

    // Certified values at the polished state, with the central-path dual
    // state W = S⁻¹/tr(S⁻¹) as the second bound candidate:
    // λ_min(A(σ)) ≤ ⟨W, base⟩ + c·λ_max(Ĝ(W)) for the contracted gradient Ĝ.
    let a = prob.assemble(c, rho);
    let low = low_eigs(&a)?;
    lam = low.lambdas[0];
    let grads: Vec<ComplexMatrix> = low
        .vectors
        .iter()
        .map(|u| prob.supergrad_matrix(c, basis, lifted, u))
        .collect();
    let mut upper = combined_density_upper(&low.lambdas, &grads, rho, f64::NEG_INFINITY)?;
    upper = upper.min(stage_bound);
    if let Some(b) = density_dual_bound(prob, c, basis, lifted, rho, t)? {
        upper = upper.min(b);
    }
    Ok(Some((lam, upper)))
}

// ---------------------------------------------------------------------------
// Bisection driver
// ---------------------------------------------------------------------------

pub(crate) struct BisectOutcome {
    pub c_lo: f64,
    pub c_hi: f64,
    pub state: StateVec,
    pub converged: bool,
}

/// Monotone bisection over `c` with certified inner verdicts.
/// `c_hi` must come with a state certifying feasibility (checked by the
/// caller); `c_lo` must be certified infeasible.
pub(crate) fn bisect<F>(
    mut query: F,
    c_lo0: f64,
    c_hi0: f64,
    state_hi: StateVec,
    rel_tol: f64,
    cap: usize,
) -> Result<BisectOutcome, Error>
where
    F: FnMut(f64, &StateVec) -> Result<Verdict, Error>,
{
    let mut lo = c_lo0;
    let mut hi = c_hi0;
    let mut state = state_hi;
    let mut warm = state.clone();
    let mut iters = 0;
    // A query sitting exactly on the feasibility threshold may come back
    // unresolved; the bracket shrinks just as well from a shifted cut, so
    // walk through these fractions before giving up on a step.
    const FRACTIONS: [f64; 5] = [0.5, 0.35, 0.65, 0.2, 0.8];
    while hi - lo > rel_tol * hi.max(1e-300) && iters < cap {
        iters += 1;
        let mut decided = false;
        for &frac in &FRACTIONS {
            let mid = lo + frac * (hi - lo);
            match query(mid, &warm)? {
                Verdict::Feasible { state: s, .. } => {
                    hi = mid;
                    state = s.clone();
                    warm = s;
                    decided = true;
                    break;
                }
                Verdict::Infeasible { state: s, .. } => {
                    lo = mid;
                    warm = s;
                    decided = true;
                    break;
                }
                Verdict::Unresolved { .. } => {}
            }
        }
        if !decided {
            return Ok(BisectOutcome {
                c_lo: lo,
                c_hi: hi,
                state,
                converged: false,
            });
        }
    }
    Ok(BisectOutcome {
        c_lo: lo,
        c_hi: hi,
        state,
        converged: hi - lo <= rel_tol * hi.max(1e-300),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scalar problem: base = [[0, t], [t̄, 0]], one functional with f = 1.
    /// Feasible iff c ≥ |t|.
    fn scalar_problem(tval: f64) -> SimplexProblem {
        let mut base = ComplexMatrix::zeros(2, 2);
        base.set(0, 1, cx(tval, 0.0));
        base.set(1, 0, cx(tval, 0.0));
        SimplexProblem {
            base,
            atoms: vec![vec![
                vec![cx(1.0, 0.0), C64::ZERO],
                vec![C64::ZERO, cx(1.0, 0.0)],
            ]],
        }
    }

    #[test]
    fn scalar_feasibility_threshold() {
        let prob = scalar_problem(0.5);
        let opts = EngineOpts::default();
        match simplex_feasibility(&prob, 0.5 + 1e-6, None, &opts).unwrap() {
            Verdict::Feasible { .. } => {}
            other => panic!("expected feasible, got {other:?}"),
        }
        match simplex_feasibility(&prob, 0.5 - 1e-4, None, &opts).unwrap() {
            Verdict::Infeasible { upper, .. } => assert!(upper < -1e-8),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn bisection_recovers_scalar_value() {
        let prob = scalar_problem(0.7);
        let opts = EngineOpts::default();
        let out = bisect(
            |c, warm| {
                let w = match warm {
                    StateVec::Prob(p) => Some(p.as_slice()),
                    _ => None,
                };
                simplex_feasibility(&prob, c, w, &opts)
            },
            0.0,
            2.0,
            StateVec::Prob(vec![1.0]),
            1e-7,
            80,
        )
        .unwrap();
        assert!(out.converged);
        assert!((out.c_hi - 0.7).abs() < 1e-6, "c_hi = {}", out.c_hi);
    }
}
