//! Minimal quantization of a finite-dimensional Banach space.
//!
//! A space enters only through a finite family of functionals from its dual
//! unit ball; all Min-norms are suprema of scalar evaluations over that
//! family. When the family is exactly the extreme points of the dual ball
//! (`exact = true`), suprema of convex quantities over the ball are computed
//! exactly; otherwise norm outputs are lower approximations of the sup and
//! dual-norm outputs are upper approximations.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::linalg::{cx, operator_norm, ComplexMatrix, C64};
use crate::reps::{Space, TensorRep};

/// Dimension cap for sign-vector families (2^n functionals).
pub const SIGN_FAMILY_DIM_CAP: usize = 10;
/// Dimension cap for complex torus-grid families.
pub const COMPLEX_FAMILY_DIM_CAP: usize = 4;
/// Default number of grid phases per coordinate for complex families.
pub const DEFAULT_GRID_PHASES: usize = 8;

/// Element of the quantized space: a coordinate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MinVector {
    pub coords: Vec<C64>,
}

impl MinVector {
    pub fn new(coords: Vec<C64>) -> Result<Self, Error> {
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("vector entries must be finite".into()));
        }
        Ok(Self { coords })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut coords = vec![C64::ZERO; dim];
        coords[index] = cx(1.0, 0.0);
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// As a 1×dim matrix, the carrier used by tensor representations.
    pub fn to_row(&self) -> ComplexMatrix {
        ComplexMatrix::new(1, self.dim(), self.coords.clone()).expect("finite coords")
    }
}

/// Finite family of dual functionals with unit dual norm (caller-declared).
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalFamily {
    dim: usize,
    functionals: Vec<Vec<C64>>,
    exact: bool,
}

impl FunctionalFamily {
    /// Build a family; it must be non-empty and span the dual space.
    pub fn new(dim: usize, functionals: Vec<Vec<C64>>, exact: bool) -> Result<Self, Error> {
        if functionals.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if functionals.iter().any(|f| f.len() != dim) {
            return Err(Error::Shape("functional length does not match dim".into()));
        }
        let fam = Self {
            dim,
            functionals,
            exact,
        };
        if !fam.spans() {
            return Err(Error::InvalidInput(
                "functional family does not span the dual space".into(),
            ));
        }
        Ok(fam)
    }

    fn spans(&self) -> bool {
        // rank(Φ) == dim via the Gram spectrum.
        let phi = self.evaluation_matrix();
        let gram = phi.adjoint().matmul(&phi);
        let h = crate::linalg::HermitianMatrix::from_matrix(&gram, 1e-9 * (1.0 + gram.max_abs()))
            .expect("Gram is Hermitian");
        match crate::linalg::hermitian_eig(&h) {
            Ok((vals, _)) => {
                let top = vals.last().copied().unwrap_or(0.0);
                top > 0.0 && vals[0] > 1e-24 * top
            }
            Err(_) => false,
        }
    }

    /// All sign vectors of real ℓ¹_n; exactly the extreme points of the dual
    /// ball (ℓ∞).
    pub fn l1_sign(n: usize) -> Result<Self, Error> {
        if n == 0 || n > SIGN_FAMILY_DIM_CAP {
            return Err(Error::DimensionCap {
                dim: n,
                cap: SIGN_FAMILY_DIM_CAP,
            });
        }
        let mut functionals = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            functionals.push(
                (0..n)
                    .map(|j| {
                        if mask >> j & 1 == 1 {
                            cx(-1.0, 0.0)
                        } else {
                            cx(1.0, 0.0)
                        }
                    })
                    .collect(),
            );
        }
        Self::new(n, functionals, true)
    }

    /// ±e_k: the extreme points of the dual ball of real ℓ∞_n (which is ℓ¹).
    pub fn linf(n: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::EmptyFamily);
        }
        let mut functionals = Vec::with_capacity(2 * n);
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut f = vec![C64::ZERO; n];
                f[k] = cx(sign, 0.0);
                functionals.push(f);
            }
        }
        Self::new(n, functionals, true)
    }

    /// Torus grid for complex ℓ¹_n: `phases` grid points per coordinate.
    /// Approximate: outputs over this family are flagged.
    pub fn l1_complex(n: usize, phases: usize) -> Result<Self, Error> {
        if n == 0 || n > COMPLEX_FAMILY_DIM_CAP {
            return Err(Error::DimensionCap {
                dim: n,
                cap: COMPLEX_FAMILY_DIM_CAP,
            });
        }
        if phases < 2 {
            return Err(Error::InvalidInput("need at least two grid phases".into()));
        }
        let count = phases.pow(n as u32);
        let mut functionals = Vec::with_capacity(count);
        for idx in 0..count {
            let mut rem = idx;
            let mut f = Vec::with_capacity(n);
            for _ in 0..n {
                let k = rem % phases;
                rem /= phases;
                let theta = 2.0 * std::f64::consts::PI * k as f64 / phases as f64;
                f.push(cx(theta.cos(), theta.sin()));
            }
            functionals.push(f);
        }
        Self::new(n, functionals, false)
    }

    /// Parse a builtin spec: `l1:3`, `linf:4`, or `l1c:2:8`.
    pub fn from_spec(spec: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = spec.split(':').collect();
        let parse = |s: &str| -> Result<usize, Error> {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad family spec `{spec}`")))
        };
        match parts.as_slice() {
            ["l1", n] => Self::l1_sign(parse(n)?),
            ["linf", n] => Self::linf(parse(n)?),
            ["l1c", n] => Self::l1_complex(parse(n)?, DEFAULT_GRID_PHASES),
            ["l1c", n, g] => Self::l1_complex(parse(n)?, parse(g)?),
            _ => Err(Error::InvalidInput(format!("unknown family spec `{spec}`"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }

    pub fn exact(&self) -> bool {
        self.exact
    }

    pub fn functional(&self, k: usize) -> &[C64] {
        &self.functionals[k]
    }

    /// Evaluate functional `k` on a coordinate vector.
    pub fn evaluate(&self, k: usize, coords: &[C64]) -> C64 {
        debug_assert_eq!(coords.len(), self.dim);
        self.functionals[k]
            .iter()
            .zip(coords)
            .map(|(f, x)| f * x)
            .sum()
    }

    /// The m×dim matrix whose k-th row evaluates functional k.
    pub fn evaluation_matrix(&self) -> ComplexMatrix {
        let mut phi = ComplexMatrix::zeros(self.len(), self.dim);
        for (k, f) in self.functionals.iter().enumerate() {
            for (j, &v) in f.iter().enumerate() {
                phi.set(k, j, v);
            }
        }
        phi
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyWire {
    dim: usize,
    functionals: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    functionals_im: Option<Vec<Vec<f64>>>,
    exact: bool,
}

impl Serialize for FunctionalFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let re: Vec<Vec<f64>> = self
            .functionals
            .iter()
            .map(|f| f.iter().map(|z| z.re).collect())
            .collect();
        let has_im = self
            .functionals
            .iter()
            .any(|f| f.iter().any(|z| z.im != 0.0));
        let im = has_im.then(|| {
            self.functionals
                .iter()
                .map(|f| f.iter().map(|z| z.im).collect())
                .collect()
        });
        FamilyWire {
            dim: self.dim,
            functionals: re,
            functionals_im: im,
            exact: self.exact,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FunctionalFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = FamilyWire::deserialize(deserializer)?;
        let mut functionals: Vec<Vec<C64>> = wire
            .functionals
            .iter()
            .map(|f| f.iter().map(|&r| cx(r, 0.0)).collect())
            .collect();
        if let Some(im) = &wire.functionals_im {
            if im.len() != functionals.len() {
                return Err(D::Error::custom("functionals_im length mismatch"));
            }
            for (f, fi) in functionals.iter_mut().zip(im) {
                if fi.len() != f.len() {
                    return Err(D::Error::custom("functionals_im row length mismatch"));
                }
                for (z, &v) in f.iter_mut().zip(fi) {
                    *z = cx(z.re, v);
                }
            }
        }
        FunctionalFamily::new(wire.dim, functionals, wire.exact).map_err(D::Error::custom)
    }
}

/// `sup_f ‖[f(x_ij)]‖` over the family: the Min(X) norm of a matrix of
/// elements. Rows must have equal length.
pub fn min_matrix_norm(rows: &[Vec<MinVector>], family: &FunctionalFamily) -> Result<f64, Error> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if rows.is_empty() {
        return Ok(0.0);
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape("ragged matrix of elements".into()));
    }
    for row in rows {
        for x in row {
            if x.dim() != family.dim() {
                return Err(Error::Shape("element dimension does not match family".into()));
            }
        }
    }
    let mut best = 0.0f64;
    for k in 0..family.len() {
        let mut scalar = ComplexMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                scalar.set(i, j, family.evaluate(k, &x.coords));
            }
        }
        best = best.max(operator_norm(&scalar));
    }
    Ok(best)
}

/// Embed a Min-space representation into the diagonal matrix algebra over the
/// family: each element becomes `diag(f_1(x), …, f_m(x))`.
pub fn embed_min_rep(rep: &TensorRep) -> Result<TensorRep, Error> {
    let family = match rep.space() {
        Space::Min { family } => family.clone(),
        Space::Matrix { .. } => {
            return Err(Error::InvalidInput(
                "embed_min_rep takes a Min-space representation".into(),
            ))
        }
    };
    let m = family.len();
    let embed = |el: &ComplexMatrix| -> ComplexMatrix {
        let coords = el.entries();
        let diag: Vec<C64> = (0..m).map(|k| family.evaluate(k, coords)).collect();
        ComplexMatrix::diagonal(&diag)
    };
    let lefts = rep.lefts().iter().map(embed).collect();
    let rights = rep.rights().iter().map(embed).collect();
    TensorRep::new(Space::Matrix { n: m }, lefts, rights)
}

/// Per-functional row/column energies of a Min representation:
/// `(Σ_i |f(x_i)|², Σ_i |f(y_i)|²)` for each f.
pub(crate) fn family_energies(rep: &TensorRep) -> Result<Vec<(f64, f64)>, Error> {
    let family = match rep.space() {
        Space::Min { family } => family.clone(),
        Space::Matrix { .. } => {
            return Err(Error::InvalidInput(
                "family energies need a Min-space representation".into(),
            ))
        }
    };
    let mut out = Vec::with_capacity(family.len());
    for k in 0..family.len() {
        let a: f64 = rep
            .lefts()
            .iter()
            .map(|x| family.evaluate(k, x.entries()).norm_sqr())
            .sum();
        let b: f64 = rep
            .rights()
            .iter()
            .map(|y| family.evaluate(k, y.entries()).norm_sqr())
            .sum();
        out.push((a, b));
    }
    Ok(out)
}

/// Upper bound for the wH norm of a Min-space representation: the balanced
/// half-sum `½·sup_f (λ²Σ|f(x_i)|² + λ⁻²Σ|f(y_i)|²)` with λ chosen by the
/// same rebalancing rule the plain wh bound uses, so the diagonal embedding
/// reproduces this value exactly. Zero when either side vanishes identically
/// (the rebalancing infimum degenerates).
pub fn min_wh_upper(rep: &TensorRep) -> Result<f64, Error> {
    let energies = family_energies(rep)?;
    let sup_a = energies.iter().map(|e| e.0).fold(0.0, f64::max);
    let sup_b = energies.iter().map(|e| e.1).fold(0.0, f64::max);
    if sup_a == 0.0 || sup_b == 0.0 {
        return Ok(0.0);
    }
    crate::reps::wh_upper(&crate::reps::rebalance(rep)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_family_counts() {
        let fam = FunctionalFamily::l1_sign(3).unwrap();
        assert_eq!(fam.len(), 8);
        assert!(fam.exact());
        assert!(FunctionalFamily::l1_sign(11).is_err());
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(FunctionalFamily::from_spec("l1:3").unwrap().len(), 8);
        assert_eq!(FunctionalFamily::from_spec("linf:4").unwrap().len(), 8);
        assert_eq!(FunctionalFamily::from_spec("l1c:2:4").unwrap().len(), 16);
        assert!(FunctionalFamily::from_spec("lp:2").is_err());
    }

    #[test]
    fn min_norm_examples() {
        let fam = FunctionalFamily::l1_sign(2).unwrap();
        let e1 = MinVector::basis(2, 0);
        let e2 = MinVector::basis(2, 1);
        let n = min_matrix_norm(&[vec![e1.clone()]], &fam).unwrap();
        assert!((n - 1.0).abs() < 1e-12);

        let n = min_matrix_norm(&[vec![e1, e2]], &fam).unwrap();
        assert!((n - 2f64.sqrt()).abs() < 1e-12);

        let zero = MinVector::new(vec![C64::ZERO; 2]).unwrap();
        let n = min_matrix_norm(&[vec![zero.clone()], vec![zero]], &fam).unwrap();
        assert_eq!(n, 0.0);
    }

    #[test]
    fn min_norm_is_monotone_in_the_family() {
        let small = FunctionalFamily::new(
            2,
            vec![vec![cx(1.0, 0.0), cx(1.0, 0.0)], vec![cx(1.0, 0.0), cx(-1.0, 0.0)]],
            false,
        )
        .unwrap();
        let big = FunctionalFamily::l1_sign(2).unwrap();
        let v = MinVector::new(vec![cx(0.3, 0.1), cx(-0.7, 0.4)]).unwrap();
        let lo = min_matrix_norm(&[vec![v.clone()]], &small).unwrap();
        let hi = min_matrix_norm(&[vec![v]], &big).unwrap();
        assert!(lo <= hi + 1e-12);
    }

    #[test]
    fn embedding_and_wh_bound_examples() {
        use crate::reps::{Space, TensorRep};
        let fam = std::sync::Arc::new(FunctionalFamily::l1_sign(2).unwrap());
        let space = Space::Min { family: fam.clone() };
        let e1 = MinVector::basis(2, 0).to_row();

        // e1 embeds as the diagonal of first-coordinate signs.
        let rep = TensorRep::new(space.clone(), vec![e1.clone()], vec![e1.clone()]).unwrap();
        let embedded = embed_min_rep(&rep).unwrap();
        let img = &embedded.lefts()[0];
        assert_eq!(img.rows(), fam.len());
        for k in 0..fam.len() {
            assert_eq!(img.get(k, k), fam.functional(k)[0]);
        }

        // Elementary e1 ⊗ e1 has wH bound 1; zero and scaling behave.
        assert!((min_wh_upper(&rep).unwrap() - 1.0).abs() < 1e-12);
        let zero = TensorRep::empty(space.clone());
        assert_eq!(min_wh_upper(&zero).unwrap(), 0.0);
        let scaled = TensorRep::new(
            space,
            vec![e1.scale(cx(3.0, 0.0))],
            vec![e1],
        )
        .unwrap();
        assert!((min_wh_upper(&scaled).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn family_json_round_trip() {
        let fam = FunctionalFamily::l1_sign(2).unwrap();
        let text = serde_json::to_string(&fam).unwrap();
        assert!(text.contains("\"exact\":true"));
        let back: FunctionalFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(fam, back);

        let complex = FunctionalFamily::l1_complex(2, 4).unwrap();
        let text = serde_json::to_string(&complex).unwrap();
        let back: FunctionalFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(complex, back);
    }
}
