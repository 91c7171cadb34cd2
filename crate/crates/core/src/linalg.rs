//! Dense complex linear algebra: matrices, Hermitian eigendecomposition,
//! operator norms, PSD square roots and pseudo-inverses.
//!
//! Everything is desk-scale dense arithmetic over `Complex<f64>`. The
//! eigensolver is a cyclic two-sided Jacobi iteration, which is accurate and
//! fully deterministic for the matrix sizes this crate works with.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Shorthand for a real complex scalar.
#[inline]
pub fn cx(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Absolute eigenvalue slack accepted when certifying positive
/// semidefiniteness. Certificates produced by the feasibility engines carry
/// this much slack.
pub const TOL_PSD: f64 = 1e-8;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Build a matrix from row-major entries. Entries must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "matrix data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, cx(1.0, 0.0));
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self, Error> {
        Self::new(rows, cols, entries.iter().map(|&r| cx(r, 0.0)).collect())
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    /// Row-major slice of all entries.
    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == C64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matvec");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == C64::ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Copy `block` into `self` with upper-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    /// Extract the `rows x cols` block with upper-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.re.len() != wire.rows * wire.cols || wire.im.len() != wire.rows * wire.cols {
            return Err(D::Error::custom("re/im length does not match rows*cols"));
        }
        let data = wire
            .re
            .iter()
            .zip(&wire.im)
            .map(|(&r, &i)| cx(r, i))
            .collect();
        ComplexMatrix::new(wire.rows, wire.cols, data).map_err(D::Error::custom)
    }
}

/// Hermitian matrix stored as the lower triangle, so Hermitian symmetry is
/// exact by construction and the diagonal is exactly real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    /// Lower triangle including the diagonal, row-major:
    /// `(i, j)` with `j <= i` lives at `i*(i+1)/2 + j`.
    tri: Vec<C64>,
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            tri: vec![C64::ZERO; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut h = Self::zeros(dim);
        for i in 0..dim {
            h.set_lower(i, i, cx(1.0, 0.0));
        }
        h
    }

    /// Hermitian-project a square matrix: `(M + M†)/2`. The skew part must be
    /// within `tol` in max-abs, otherwise the input was not Hermitian.
    pub fn from_matrix(m: &ComplexMatrix, tol: f64) -> Result<Self, Error> {
        if !m.is_square() {
            return Err(Error::Shape("Hermitian matrix must be square".into()));
        }
        let n = m.rows();
        let mut h = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let a = m.get(i, j);
                let b = m.get(j, i).conj();
                if (a - b).norm() > tol * 2.0 {
                    return Err(Error::Shape(format!(
                        "matrix is not Hermitian at ({i},{j}): skew part {:.3e}",
                        (a - b).norm() / 2.0
                    )));
                }
                let mut v = (a + b) * cx(0.5, 0.0);
                if i == j {
                    v = cx(v.re, 0.0);
                }
                h.set_lower(i, j, v);
            }
        }
        Ok(h)
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut h = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            h.set_lower(i, i, cx(d, 0.0));
        }
        h
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Set entry `(i, j)` of the lower triangle (`j <= i`).
    pub fn set_lower(&mut self, i: usize, j: usize, v: C64) {
        assert!(j <= i && i < self.dim);
        let v = if i == j { cx(v.re, 0.0) } else { v };
        self.tri[i * (i + 1) / 2 + j] = v;
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        if j <= i {
            self.tri[i * (i + 1) / 2 + j]
        } else {
            self.tri[j * (j + 1) / 2 + i].conj()
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(i, j, self.entry(i, j));
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i).re).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            tri: self
                .tri
                .iter()
                .zip(&other.tri)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            tri: self.tri.iter().map(|z| z * factor).collect(),
        }
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_matrix().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        HermitianMatrix::from_matrix(&m, 1e-9 * (1.0 + m.max_abs())).map_err(D::Error::custom)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations: `H = V diag(λ) V†` with `λ` ascending and `V` unitary.
///
/// Eigenvector phases are normalized so the first component above the noise
/// floor is real positive, which makes the output reproducible.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<(Vec<f64>, ComplexMatrix), Error> {
    let n = h.dim();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let mut a = h.to_matrix();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);
    let off_tol = 1e-14 * scale;

    let mut converged = false;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= off_tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let e = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary J differing from identity at rows/cols (p, q):
                // J[p,p]=c, J[p,q]=s, J[q,p]=-s*conj(e), J[q,q]=c*conj(e).
                let ec = e.conj();
                // A <- J† A (rows p, q)
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c - aqj * (e * s));
                    a.set(q, j, apj * s + aqj * (e * c));
                }
                // A <- A J (columns p, q)
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c - aiq * (ec * s));
                    a.set(i, q, aip * s + aiq * (ec * c));
                }
                // V <- V J
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * (ec * s));
                    v.set(i, q, vip * s + viq * (ec * c));
                }
                a.set(p, q, C64::ZERO);
                a.set(q, p, C64::ZERO);
            }
        }
    }
    if !converged {
        return Err(Error::EigNonConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &idx) in order.iter().enumerate() {
        values.push(diag[idx]);
        let col = v.column(idx);
        // Deterministic phase: first component above the noise floor becomes
        // real positive.
        let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut phase = cx(1.0, 0.0);
        for z in &col {
            if z.norm() > 1e-12 * norm.max(1e-300) {
                phase = z.conj() / z.norm();
                break;
            }
        }
        for i in 0..n {
            vectors.set(i, k, col[i] * phase);
        }
    }
    Ok((values, vectors))
}

/// Largest singular value: `sqrt(λ_max(M†M))`.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    // Work with the smaller Gram matrix.
    let gram = if m.rows() >= m.cols() {
        m.adjoint().matmul(m)
    } else {
        m.matmul(&m.adjoint())
    };
    let h = HermitianMatrix::from_matrix(&gram, 1e-9 * (1.0 + gram.max_abs()))
        .expect("Gram matrix is Hermitian");
    let (vals, _) = hermitian_eig(&h).expect("Gram eigendecomposition");
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min(h: &HermitianMatrix) -> Result<f64, Error> {
    let (vals, _) = hermitian_eig(h)?;
    Ok(vals.first().copied().unwrap_or(0.0))
}

/// PSD square root. Eigenvalues in `[-TOL_PSD, 0)` are clamped to zero;
/// anything below `-TOL_PSD` is rejected as not PSD.
pub fn psd_sqrt(p: &HermitianMatrix) -> Result<HermitianMatrix, Error> {
    let (vals, vecs) = hermitian_eig(p)?;
    if let Some(&lo) = vals.first() {
        if lo < -TOL_PSD {
            return Err(Error::NotPsd { lambda_min: lo });
        }
    }
    let n = p.dim();
    let mut s = HermitianMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = C64::ZERO;
            for k in 0..n {
                let w = vals[k].max(0.0).sqrt();
                acc += vecs.get(i, k) * vecs.get(j, k).conj() * w;
            }
            s.set_lower(i, j, acc);
        }
    }
    Ok(s)
}

/// Moore-Penrose pseudo-inverse via the Gram eigendecomposition. Singular
/// values below `rel_tol * σ_max` are treated as zero.
pub fn pseudo_inverse(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    if m.rows() == 0 || m.cols() == 0 {
        return m.adjoint();
    }
    let gram = m.adjoint().matmul(m);
    let h = HermitianMatrix::from_matrix(&gram, 1e-9 * (1.0 + gram.max_abs()))
        .expect("Gram matrix is Hermitian");
    let (vals, vecs) = hermitian_eig(&h).expect("Gram eigendecomposition");
    let smax = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let cut = (rel_tol * smax).max(0.0);
    // pinv = V Λ⁺ V† M† with Λ⁺ keeping σ > cut.
    let d = m.cols();
    let mut core = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let sigma = vals[k].max(0.0).sqrt();
        if sigma <= cut || sigma == 0.0 {
            continue;
        }
        let w = 1.0 / (sigma * sigma);
        for i in 0..d {
            for j in 0..d {
                let v = core.get(i, j) + vecs.get(i, k) * vecs.get(j, k).conj() * w;
                core.set(i, j, v);
            }
        }
    }
    core.matmul(&m.adjoint())
}

/// One-sided Jacobi orthogonalization of the columns of `x`: returns a
/// unitary `w` (m×m) such that the columns of `x·w` are pairwise orthogonal,
/// together with their norms. Unlike the Gram-eigenvalue route this keeps
/// high relative accuracy for small singular values.
pub(crate) fn orthogonalize_columns(x: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>), Error> {
    let m = x.cols();
    let mut cols: Vec<Vec<C64>> = (0..m).map(|j| x.column(j)).collect();
    let mut w = ComplexMatrix::identity(m);
    let mut converged = m < 2;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let a: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let b: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let g: C64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(u, v)| u.conj() * v)
                    .sum();
                let r = g.norm();
                // Columns count as orthogonal once the inner product sits at
                // the rounding floor of its own computation.
                if r <= 1e-30 || r * r <= 1e-28 * a * b {
                    continue;
                }
                rotated = true;
                let e = g / r;
                let tau = (b - a) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ec = e.conj();
                for i in 0..cols[p].len() {
                    let cp = cols[p][i];
                    let cq = cols[q][i];
                    cols[p][i] = cp * c - cq * (ec * s);
                    cols[q][i] = cp * s + cq * (ec * c);
                }
                for i in 0..m {
                    let wp = w.get(i, p);
                    let wq = w.get(i, q);
                    w.set(i, p, wp * c - wq * (ec * s));
                    w.set(i, q, wp * s + wq * (ec * c));
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::EigNonConvergence);
    }
    let sigmas = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Ok((w, sigmas))
}

/// Cholesky factorization `A = L L†` of a Hermitian positive definite matrix.
/// Returns `None` when a pivot is not strictly positive.
pub(crate) struct Cholesky {
    n: usize,
    /// Lower factor, row-major dense.
    l: Vec<C64>,
}

impl Cholesky {
    pub(crate) fn new(a: &ComplexMatrix) -> Option<Self> {
        assert!(a.is_square());
        let n = a.rows();
        let mut l = vec![C64::ZERO; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a.get(i, j);
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k].conj();
                }
                if i == j {
                    if sum.re <= 0.0 || !sum.re.is_finite() {
                        return None;
                    }
                    l[i * n + i] = cx(sum.re.sqrt(), 0.0);
                } else {
                    l[i * n + j] = sum / l[j * n + j].re;
                }
            }
        }
        Some(Self { n, l })
    }

    pub(crate) fn log_det(&self) -> f64 {
        (0..self.n)
            .map(|i| self.l[i * self.n + i].re.ln())
            .sum::<f64>()
            * 2.0
    }

    /// Solve `A x = b`.
    pub(crate) fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[i * n + k];
                y[i] = y[i] - lik * y[k];
            }
            y[i] /= self.l[i * n + i].re;
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let lki = self.l[k * n + i].conj();
                y[i] = y[i] - lki * y[k];
            }
            y[i] /= self.l[i * n + i].re;
        }
        y
    }

    /// Inverse matrix `A⁻¹`.
    pub(crate) fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![C64::ZERO; n];
            e[j] = cx(1.0, 0.0);
            let col = self.solve_vec(&e);
            for i in 0..n {
                out.set(i, j, col[i]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, re: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real(rows, cols, re).unwrap()
    }

    #[test]
    fn eig_identity() {
        let h = HermitianMatrix::identity(3);
        let (vals, vecs) = hermitian_eig(&h).unwrap();
        for v in vals {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let vtv = vecs.adjoint().matmul(&vecs);
        assert!(vtv.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn eig_diag_and_flip() {
        let h = HermitianMatrix::from_real_diag(&[1.0, 2.0]);
        let (vals, _) = hermitian_eig(&h).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 2.0).abs() < 1e-12);

        let m = mat(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let h = HermitianMatrix::from_matrix(&m, 1e-12).unwrap();
        let (vals, _) = hermitian_eig(&h).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs() {
        let m = mat(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, -0.25, 0.5, -0.25, 2.0]);
        let h = HermitianMatrix::from_matrix(&m, 1e-12).unwrap();
        let (vals, vecs) = hermitian_eig(&h).unwrap();
        let d = ComplexMatrix::diagonal(&vals.iter().map(|&v| cx(v, 0.0)).collect::<Vec<_>>());
        let rec = vecs.matmul(&d).matmul(&vecs.adjoint());
        assert!(rec.max_abs_diff(&h.to_matrix()) < 1e-10 * (1.0 + h.to_matrix().max_abs()));
        let tr: f64 = vals.iter().sum();
        assert!((tr - h.trace()).abs() < 1e-10 * (1.0 + h.trace().abs()));
    }

    #[test]
    fn eig_complex_hermitian() {
        let mut h = HermitianMatrix::zeros(3);
        h.set_lower(0, 0, cx(1.0, 0.0));
        h.set_lower(1, 1, cx(-0.5, 0.0));
        h.set_lower(2, 2, cx(0.25, 0.0));
        h.set_lower(1, 0, cx(0.3, 0.7));
        h.set_lower(2, 0, cx(-0.2, 0.1));
        h.set_lower(2, 1, cx(0.0, -1.3));
        let (vals, vecs) = hermitian_eig(&h).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = ComplexMatrix::diagonal(&vals.iter().map(|&v| cx(v, 0.0)).collect::<Vec<_>>());
        let rec = vecs.matmul(&d).matmul(&vecs.adjoint());
        assert!(rec.max_abs_diff(&h.to_matrix()) < 1e-11);
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 2)), 0.0);
        let d = mat(2, 2, &[3.0, 0.0, 0.0, -4.0]);
        assert!((operator_norm(&d) - 4.0).abs() < 1e-12);
        let col = mat(2, 1, &[1.0, 1.0]);
        assert!((operator_norm(&col) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn psd_sqrt_examples() {
        let s = psd_sqrt(&HermitianMatrix::identity(4)).unwrap();
        assert!(s.to_matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);

        let s = psd_sqrt(&HermitianMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        let expect = mat(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert!(s.to_matrix().max_abs_diff(&expect) < 1e-12);

        // Multiply the result by itself and get the input back.
        let m = mat(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let h = HermitianMatrix::from_matrix(&m, 1e-12).unwrap();
        let s = psd_sqrt(&h).unwrap().to_matrix();
        assert!(s.matmul(&s).max_abs_diff(&m) < 1e-9 * (1.0 + operator_norm(&m)));
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let h = HermitianMatrix::from_real_diag(&[1.0, -0.5]);
        match psd_sqrt(&h) {
            Err(Error::NotPsd { lambda_min }) => assert!((lambda_min + 0.5).abs() < 1e-12),
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn pseudo_inverse_rectangular() {
        let a = mat(3, 2, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let p = pseudo_inverse(&a, 1e-12);
        // A A⁺ A = A
        let back = a.matmul(&p).matmul(&a);
        assert!(back.max_abs_diff(&a) < 1e-10);
    }

    #[test]
    fn cholesky_solves() {
        let m = mat(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let ch = Cholesky::new(&m).unwrap();
        let x = ch.solve_vec(&[cx(1.0, 0.0), cx(0.0, 1.0)]);
        let b = m.matvec(&x);
        assert!((b[0] - cx(1.0, 0.0)).norm() < 1e-12);
        assert!((b[1] - cx(0.0, 1.0)).norm() < 1e-12);
        assert!(Cholesky::new(&mat(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_none());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![cx(0.1, -0.7), cx(1.0 / 3.0, 0.0), cx(-2.5e-13, 4.0), cx(0.0, -0.0)],
        )
        .unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        for (a, b) in m.entries().iter().zip(back.entries()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
