//! Tensor representations and representation-based norm upper bounds.
//!
//! A tensor `u = Σ x_i ⊗ y_i` over a matrix algebra or a Min space is stored
//! by its element families. The norms wh, wh' and h are computed from block
//! rows/columns of one representation (upper bounds of the infimum-norms);
//! `minimal_representation` performs the two-pass reduction to linearly
//! independent families; `wh_to_big_wh` / `big_wh_to_wh` are the explicit
//! conversions between the wh form and the weighted form `Σ x_i* α_ij ⊗ x_j`.

use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::linalg::{cx, operator_norm, psd_sqrt, ComplexMatrix, C64};
use crate::minspace::{self, FunctionalFamily};
use crate::numrad::{ando_witness, numerical_radius, AndoOutcome};

/// Singular values below this multiple of the largest are treated as zero in
/// rank decisions.
pub const RANK_ZERO_REL: f64 = 1e-10;
/// Relative band of singular values that triggers the rank-ambiguity warning.
pub const RANK_WARN_BAND: (f64, f64) = (1e-12, 1e-8);

/// Carrier space of a tensor representation.
#[derive(Debug, Clone)]
pub enum Space {
    Matrix { n: usize },
    Min { family: Arc<FunctionalFamily> },
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Space::Matrix { n: a }, Space::Matrix { n: b }) => a == b,
            (Space::Min { family: a }, Space::Min { family: b }) => a == b,
            _ => false,
        }
    }
}

impl Space {
    /// Shape of a single element in this space.
    pub fn element_shape(&self) -> (usize, usize) {
        match self {
            Space::Matrix { n } => (*n, *n),
            Space::Min { family } => (1, family.dim()),
        }
    }

    /// Dimension of the coefficient space (flattened elements).
    pub fn coeff_dim(&self) -> usize {
        let (r, c) = self.element_shape();
        r * c
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self, Space::Matrix { .. })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SpaceWire {
    Matrix {
        n: usize,
    },
    Min {
        #[serde(skip_serializing_if = "Option::is_none")]
        family: Option<FunctionalFamily>,
        #[serde(skip_serializing_if = "Option::is_none")]
        builtin: Option<String>,
    },
}

impl Serialize for Space {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Space::Matrix { n } => SpaceWire::Matrix { n: *n }.serialize(serializer),
            Space::Min { family } => SpaceWire::Min {
                family: Some(family.as_ref().clone()),
                builtin: None,
            }
            .serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match SpaceWire::deserialize(deserializer)? {
            SpaceWire::Matrix { n } => Ok(Space::Matrix { n }),
            SpaceWire::Min { family, builtin } => {
                let fam = match (family, builtin) {
                    (Some(f), None) => f,
                    (None, Some(spec)) => {
                        FunctionalFamily::from_spec(&spec).map_err(D::Error::custom)?
                    }
                    _ => {
                        return Err(D::Error::custom(
                            "min space needs exactly one of `family` or `builtin`",
                        ))
                    }
                };
                Ok(Space::Min {
                    family: Arc::new(fam),
                })
            }
        }
    }
}

/// A finite representation `u = Σ x_i ⊗ y_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorRep {
    space: Space,
    lefts: Vec<ComplexMatrix>,
    rights: Vec<ComplexMatrix>,
}

impl TensorRep {
    pub fn new(
        space: Space,
        lefts: Vec<ComplexMatrix>,
        rights: Vec<ComplexMatrix>,
    ) -> Result<Self, Error> {
        if lefts.len() != rights.len() {
            return Err(Error::Shape("left/right families differ in length".into()));
        }
        let shape = space.element_shape();
        for el in lefts.iter().chain(&rights) {
            if (el.rows(), el.cols()) != shape {
                return Err(Error::Shape(format!(
                    "element is {}x{}, space expects {}x{}",
                    el.rows(),
                    el.cols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(Self {
            space,
            lefts,
            rights,
        })
    }

    pub fn empty(space: Space) -> Self {
        Self {
            space,
            lefts: Vec::new(),
            rights: Vec::new(),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn lefts(&self) -> &[ComplexMatrix] {
        &self.lefts
    }

    pub fn rights(&self) -> &[ComplexMatrix] {
        &self.rights
    }

    pub fn len(&self) -> usize {
        self.lefts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lefts.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct PairWire {
    x: ComplexMatrix,
    y: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct TensorRepWire {
    space: Space,
    pairs: Vec<PairWire>,
}

impl Serialize for TensorRep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TensorRepWire {
            space: self.space.clone(),
            pairs: self
                .lefts
                .iter()
                .zip(&self.rights)
                .map(|(x, y)| PairWire {
                    x: x.clone(),
                    y: y.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TensorRep {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = TensorRepWire::deserialize(deserializer)?;
        let (lefts, rights) = wire.pairs.into_iter().map(|p| (p.x, p.y)).unzip();
        TensorRep::new(wire.space, lefts, rights).map_err(D::Error::custom)
    }
}

/// The weighted form `u = Σ x_i* α_ij ⊗ x_j` over a matrix algebra.
#[derive(Debug, Clone)]
pub struct WhRep {
    space: Space,
    xs: Vec<ComplexMatrix>,
    alpha: ComplexMatrix,
}

impl WhRep {
    pub fn new(space: Space, xs: Vec<ComplexMatrix>, alpha: ComplexMatrix) -> Result<Self, Error> {
        if !space.is_matrix() {
            return Err(Error::InvalidInput(
                "weighted representations live over matrix algebras".into(),
            ));
        }
        if !alpha.is_square() || alpha.rows() != xs.len() {
            return Err(Error::Shape("alpha must be square with dim = xs.len".into()));
        }
        let shape = space.element_shape();
        for el in &xs {
            if (el.rows(), el.cols()) != shape {
                return Err(Error::Shape("xs element shape mismatch".into()));
            }
        }
        Ok(Self { space, xs, alpha })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn xs(&self) -> &[ComplexMatrix] {
        &self.xs
    }

    pub fn alpha(&self) -> &ComplexMatrix {
        &self.alpha
    }
}

#[derive(Serialize, Deserialize)]
struct WhRepWire {
    space: Space,
    xs: Vec<ComplexMatrix>,
    alpha: ComplexMatrix,
}

impl Serialize for WhRep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WhRepWire {
            space: self.space.clone(),
            xs: self.xs.clone(),
            alpha: self.alpha.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WhRep {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = WhRepWire::deserialize(deserializer)?;
        WhRep::new(wire.space, wire.xs, wire.alpha).map_err(D::Error::custom)
    }
}

/// Canonical coordinates of the tensor in the flattened product basis:
/// `U[p,q] = Σ_i x_i[p]·y_i[q]`.
pub fn tensor_coefficients(rep: &TensorRep) -> ComplexMatrix {
    let d = rep.space().coeff_dim();
    let mut u = ComplexMatrix::zeros(d, d);
    for (x, y) in rep.lefts().iter().zip(rep.rights()) {
        let xe = x.entries();
        let ye = y.entries();
        for p in 0..d {
            if xe[p] == C64::ZERO {
                continue;
            }
            for q in 0..d {
                u.set(p, q, u.get(p, q) + xe[p] * ye[q]);
            }
        }
    }
    u
}

/// Coordinates of the tensor represented by a weighted form:
/// `U[p,q] = Σ_ij α_ij · (x_i*)[p] · x_j[q]`.
pub fn big_wh_coefficients(rep: &WhRep) -> ComplexMatrix {
    let d = rep.space().coeff_dim();
    let mut u = ComplexMatrix::zeros(d, d);
    let adj: Vec<ComplexMatrix> = rep.xs().iter().map(|x| x.adjoint()).collect();
    for (i, xi) in adj.iter().enumerate() {
        for (j, xj) in rep.xs().iter().enumerate() {
            let a = rep.alpha().get(i, j);
            if a == C64::ZERO {
                continue;
            }
            let xie = xi.entries();
            let xje = xj.entries();
            for p in 0..d {
                if xie[p] == C64::ZERO {
                    continue;
                }
                for q in 0..d {
                    u.set(p, q, u.get(p, q) + a * xie[p] * xje[q]);
                }
            }
        }
    }
    u
}

/// Row and column energies of a matrix-space representation:
/// `(‖Σ x_i x_i†‖, ‖Σ y_i† y_i‖)`. For Min-space representations the same
/// quantities through the family suprema (the diagonal embedding).
fn side_norms(rep: &TensorRep) -> Result<(f64, f64), Error> {
    match rep.space() {
        Space::Matrix { n } => {
            let mut row = ComplexMatrix::zeros(*n, *n);
            let mut col = ComplexMatrix::zeros(*n, *n);
            for x in rep.lefts() {
                row = row.add(&x.matmul(&x.adjoint()));
            }
            for y in rep.rights() {
                col = col.add(&y.adjoint().matmul(y));
            }
            Ok((operator_norm(&row), operator_norm(&col)))
        }
        Space::Min { .. } => {
            let energies = minspace::family_energies(rep)?;
            Ok((
                energies.iter().map(|e| e.0).fold(0.0, f64::max),
                energies.iter().map(|e| e.1).fold(0.0, f64::max),
            ))
        }
    }
}

/// `‖[x_1, …, x_n, y_1*, …, y_n*]‖ = ‖Σ x_i x_i† + Σ y_i† y_i‖^{1/2}`.
pub fn block_row_norm(rep: &TensorRep) -> Result<f64, Error> {
    match rep.space() {
        Space::Matrix { n } => {
            let mut acc = ComplexMatrix::zeros(*n, *n);
            for x in rep.lefts() {
                acc = acc.add(&x.matmul(&x.adjoint()));
            }
            for y in rep.rights() {
                acc = acc.add(&y.adjoint().matmul(y));
            }
            Ok(operator_norm(&acc).sqrt())
        }
        Space::Min { .. } => {
            // Diagonal embedding: the blocks commute, so the norm is the
            // family supremum of the scalar energies.
            let energies = minspace::family_energies(rep)?;
            Ok(energies
                .iter()
                .map(|&(a, b)| a + b)
                .fold(0.0, f64::max)
                .sqrt())
        }
    }
}

/// wh upper bound of one representation: `½·block_row_norm²`.
pub fn wh_upper(rep: &TensorRep) -> Result<f64, Error> {
    Ok(0.5 * block_row_norm(rep)?.powi(2))
}

/// wh' upper bound: `½·‖Σ x_i† x_i + Σ y_i† y_i‖` (column version).
pub fn whp_upper(rep: &TensorRep) -> Result<f64, Error> {
    match rep.space() {
        Space::Matrix { n } => {
            let mut acc = ComplexMatrix::zeros(*n, *n);
            for x in rep.lefts() {
                acc = acc.add(&x.adjoint().matmul(x));
            }
            for y in rep.rights() {
                acc = acc.add(&y.adjoint().matmul(y));
            }
            Ok(0.5 * operator_norm(&acc))
        }
        Space::Min { .. } => {
            // Diagonal embedding makes rows and columns agree.
            let energies = minspace::family_energies(rep)?;
            Ok(0.5 * energies.iter().map(|&(a, b)| a + b).fold(0.0, f64::max))
        }
    }
}

/// Haagerup upper bound of one representation, through the balancing
/// identity: `√(‖Σ x x†‖·‖Σ y† y‖)`.
pub fn h_upper(rep: &TensorRep) -> Result<f64, Error> {
    let (a, b) = side_norms(rep)?;
    let (_, value) = crate::numrad::balance(a, b)?;
    Ok(value)
}

/// Rescale left elements by λ and right elements by 1/λ so that the two side
/// norms agree; the tensor itself is unchanged. A representation with one
/// side identically zero is returned unchanged. When equalizing the side
/// norms would increase the wh bound (possible for non-commuting block
/// sums), the input is kept: the result never exceeds either the original
/// wh bound or the h bound.
pub fn rebalance(rep: &TensorRep) -> Result<TensorRep, Error> {
    let (a, b) = side_norms(rep)?;
    if a == 0.0 || b == 0.0 {
        return Ok(rep.clone());
    }
    let lam = (b / a).powf(0.25);
    let lefts = rep.lefts().iter().map(|x| x.scale(cx(lam, 0.0))).collect();
    let rights = rep
        .rights()
        .iter()
        .map(|y| y.scale(cx(1.0 / lam, 0.0)))
        .collect();
    let balanced = TensorRep::new(rep.space().clone(), lefts, rights)?;
    if wh_upper(&balanced)? <= wh_upper(rep)? {
        Ok(balanced)
    } else {
        Ok(rep.clone())
    }
}

/// Stack a family of elements as the columns of one matrix.
fn element_stack(elems: &[ComplexMatrix]) -> ComplexMatrix {
    let m = elems.len();
    let n = elems.first().map(|e| e.entries().len()).unwrap_or(0);
    let mut x = ComplexMatrix::zeros(n, m);
    for (j, el) in elems.iter().enumerate() {
        for (i, &v) in el.entries().iter().enumerate() {
            x.set(i, j, v);
        }
    }
    x
}

struct ReductionPass {
    /// Combination matrix: kept columns of the orthogonalizing unitary,
    /// largest σ first.
    v: ComplexMatrix,
    kept: usize,
    warned: bool,
}

/// Orthogonalize one side of the representation by one-sided Jacobi; keep
/// the directions carrying singular values above the rank threshold. The
/// `conjugate` flag selects which Gram convention the pass realizes (the
/// right-family pass uses the conjugated combinations).
fn reduction_pass(elems: &[ComplexMatrix], conjugate: bool) -> Result<ReductionPass, Error> {
    let m = elems.len();
    let (w, sigmas) = crate::linalg::orthogonalize_columns(&element_stack(elems))?;
    let smax = sigmas.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(ReductionPass {
            v: ComplexMatrix::zeros(m, 0),
            kept: 0,
            warned: false,
        });
    }
    let warned = sigmas
        .iter()
        .any(|&s| s >= RANK_WARN_BAND.0 * smax && s <= RANK_WARN_BAND.1 * smax);
    let mut keep: Vec<usize> = (0..m).filter(|&k| sigmas[k] > RANK_ZERO_REL * smax).collect();
    keep.sort_by(|&i, &j| sigmas[j].partial_cmp(&sigmas[i]).unwrap());
    let mut v = ComplexMatrix::zeros(m, keep.len());
    for (col, &k) in keep.iter().enumerate() {
        for i in 0..m {
            let entry = if conjugate {
                w.get(i, k).conj()
            } else {
                w.get(i, k)
            };
            v.set(i, col, entry);
        }
    }
    Ok(ReductionPass {
        v,
        kept: keep.len(),
        warned,
    })
}

fn combine(elems: &[ComplexMatrix], weights: &[C64], shape: (usize, usize)) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(shape.0, shape.1);
    for (el, &w) in elems.iter().zip(weights) {
        if w != C64::ZERO {
            acc = acc.add(&el.scale(w));
        }
    }
    acc
}

/// Two-pass reduction to linearly independent left and right families,
/// preserving the tensor and never increasing the block row norm. The flag
/// reports singular values inside the rank-ambiguity band.
pub fn minimal_representation(rep: &TensorRep) -> Result<(TensorRep, bool), Error> {
    let shape = rep.space().element_shape();
    // Drop pairs with a vanishing side: they contribute nothing.
    let mut lefts: Vec<ComplexMatrix> = Vec::new();
    let mut rights: Vec<ComplexMatrix> = Vec::new();
    for (x, y) in rep.lefts().iter().zip(rep.rights()) {
        if x.max_abs() > 0.0 && y.max_abs() > 0.0 {
            lefts.push(x.clone());
            rights.push(y.clone());
        }
    }
    let mut warned = false;

    // Right pass: make the y-family independent.
    if !rights.is_empty() {
        let pass = reduction_pass(&rights, true)?;
        warned |= pass.warned;
        let m = rights.len();
        let mut new_lefts = Vec::with_capacity(pass.kept);
        let mut new_rights = Vec::with_capacity(pass.kept);
        for k in 0..pass.kept {
            let wx: Vec<C64> = (0..m).map(|i| pass.v.get(i, k)).collect();
            let wy: Vec<C64> = (0..m).map(|i| pass.v.get(i, k).conj()).collect();
            new_lefts.push(combine(&lefts, &wx, shape));
            new_rights.push(combine(&rights, &wy, shape));
        }
        lefts = new_lefts;
        rights = new_rights;
    }

    // Left pass: same construction driven by the x-family stack.
    if !lefts.is_empty() {
        let pass = reduction_pass(&lefts, false)?;
        warned |= pass.warned;
        let m = lefts.len();
        let mut new_lefts = Vec::with_capacity(pass.kept);
        let mut new_rights = Vec::with_capacity(pass.kept);
        for k in 0..pass.kept {
            let wx: Vec<C64> = (0..m).map(|i| pass.v.get(i, k)).collect();
            let wy: Vec<C64> = (0..m).map(|i| pass.v.get(i, k).conj()).collect();
            new_lefts.push(combine(&lefts, &wx, shape));
            new_rights.push(combine(&rights, &wy, shape));
        }
        lefts = new_lefts;
        rights = new_rights;
    }

    Ok((TensorRep::new(rep.space().clone(), lefts, rights)?, warned))
}

/// Numerical rank of an element family at the reduction threshold, with the
/// smallest-to-largest singular value ratio.
pub fn family_rank(elems: &[ComplexMatrix]) -> Result<(usize, f64), Error> {
    if elems.is_empty() {
        return Ok((0, 0.0));
    }
    let (_, sigmas) = crate::linalg::orthogonalize_columns(&element_stack(elems))?;
    let smax = sigmas.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok((0, 0.0));
    }
    let rank = sigmas.iter().filter(|&&s| s > RANK_ZERO_REL * smax).count();
    let smin = sigmas.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((rank, smin / smax))
}

/// Convert `Σ x_i ⊗ y_i` into the weighted form with
/// `xs = [x_1†, …, x_n†, y_1, …, y_n]` and the nilpotent
/// `α = [[0, 1_n], [0, 0]]`, whose numerical radius is ½.
pub fn wh_to_big_wh(rep: &TensorRep) -> Result<WhRep, Error> {
    if !rep.space().is_matrix() {
        return Err(Error::InvalidInput(
            "the weighted conversion needs a matrix-algebra representation".into(),
        ));
    }
    let n = rep.len();
    let mut xs = Vec::with_capacity(2 * n);
    for x in rep.lefts() {
        xs.push(x.adjoint());
    }
    for y in rep.rights() {
        xs.push(y.clone());
    }
    let mut alpha = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        alpha.set(i, n + i, cx(1.0, 0.0));
    }
    WhRep::new(rep.space().clone(), xs, alpha)
}

/// Upper bound of the Wh norm from one weighted representation:
/// `‖Σ x_i† x_i‖ · w(α)`.
pub fn big_wh_upper(rep: &WhRep) -> Result<f64, Error> {
    if rep.xs().is_empty() {
        return Ok(0.0);
    }
    let (rows, cols) = rep.space().element_shape();
    let mut acc = ComplexMatrix::zeros(cols, cols);
    let _ = rows;
    for x in rep.xs() {
        acc = acc.add(&x.adjoint().matmul(x));
    }
    Ok(operator_norm(&acc) * numerical_radius(rep.alpha())?)
}

/// Convert a weighted representation back to a plain one via the Ando
/// witness of `α/w(α)`: with `P = [[1+β, α'], [α'†, 1-β]]` and `S = P^{1/2}`,
/// the pair families are `c = [x*, 0]·S` and `d = S·[0, x]ᵗ`, both scaled by
/// `√w(α)`.
pub fn big_wh_to_wh(rep: &WhRep, tol: f64) -> Result<TensorRep, Error> {
    let space = rep.space().clone();
    let l = rep.xs().len();
    if l == 0 || rep.alpha().max_abs() == 0.0 {
        return Ok(TensorRep::empty(space));
    }
    let w = numerical_radius(rep.alpha())?;
    if w == 0.0 {
        return Ok(TensorRep::empty(space));
    }
    let alpha_unit = rep.alpha().scale(cx(1.0 / w, 0.0));
    let witness = match ando_witness(&alpha_unit, tol)? {
        AndoOutcome::Witness(wit) => wit,
        AndoOutcome::Infeasible { w: wn } => {
            return Err(Error::SolverStall(format!(
                "normalized alpha reported infeasible (w = {wn})"
            )))
        }
    };
    let s = psd_sqrt(&witness.p)?.to_matrix();
    let shape = space.element_shape();
    let adj: Vec<ComplexMatrix> = rep.xs().iter().map(|x| x.adjoint()).collect();
    let scale = cx(w.sqrt(), 0.0);

    let mut lefts = Vec::with_capacity(2 * l);
    let mut rights = Vec::with_capacity(2 * l);
    for j in 0..2 * l {
        // c_j = Σ_i x_i* S[i,j], over the first l rows of S.
        let mut c = ComplexMatrix::zeros(shape.0, shape.1);
        for (i, xa) in adj.iter().enumerate() {
            let coeff = s.get(i, j);
            if coeff != C64::ZERO {
                c = c.add(&xa.scale(coeff));
            }
        }
        // d_j = Σ_i S[j, l+i] x_i.
        let mut d = ComplexMatrix::zeros(shape.0, shape.1);
        for (i, x) in rep.xs().iter().enumerate() {
            let coeff = s.get(j, l + i);
            if coeff != C64::ZERO {
                d = d.add(&x.scale(coeff));
            }
        }
        lefts.push(c.scale(scale));
        rights.push(d.scale(scale));
    }
    TensorRep::new(space, lefts, rights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_matrix, rng_from_seed};

    fn matrix_space(n: usize) -> Space {
        Space::Matrix { n }
    }

    fn unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        m.set(i, j, cx(1.0, 0.0));
        m
    }

    #[test]
    fn coefficients_of_elementary_pairs() {
        let rep = TensorRep::empty(matrix_space(2));
        assert_eq!(tensor_coefficients(&rep).max_abs(), 0.0);

        let fam = std::sync::Arc::new(FunctionalFamily::l1_sign(2).unwrap());
        let e1 = crate::minspace::MinVector::basis(2, 0).to_row();
        let e2 = crate::minspace::MinVector::basis(2, 1).to_row();
        let rep = TensorRep::new(Space::Min { family: fam }, vec![e1], vec![e2]).unwrap();
        let u = tensor_coefficients(&rep);
        assert_eq!(u.get(0, 1), cx(1.0, 0.0));
        assert!((u.max_abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn block_row_norm_examples() {
        // Scalars x = [1], y = [1] → √2.
        let one = ComplexMatrix::identity(1);
        let rep = TensorRep::new(matrix_space(1), vec![one.clone()], vec![one]).unwrap();
        assert!((block_row_norm(&rep).unwrap() - 2f64.sqrt()).abs() < 1e-12);

        // (e11, e11) in M2: e11e11† + e11†e11 = 2e11, norm 2, sqrt = √2.
        let e11 = unit(2, 0, 0);
        let rep = TensorRep::new(matrix_space(2), vec![e11.clone()], vec![e11]).unwrap();
        assert!((block_row_norm(&rep).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((wh_upper(&rep).unwrap() - 1.0).abs() < 1e-12);

        assert_eq!(block_row_norm(&TensorRep::empty(matrix_space(2))).unwrap(), 0.0);
    }

    #[test]
    fn whp_examples() {
        let one = ComplexMatrix::identity(1);
        let rep = TensorRep::new(matrix_space(1), vec![one.clone()], vec![one]).unwrap();
        assert!((whp_upper(&rep).unwrap() - 1.0).abs() < 1e-12);

        let e12 = unit(2, 0, 1);
        let rep = TensorRep::new(matrix_space(2), vec![e12.clone()], vec![e12]).unwrap();
        assert!((whp_upper(&rep).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn h_upper_examples() {
        let two = ComplexMatrix::identity(1).scale(cx(2.0, 0.0));
        let three = ComplexMatrix::identity(1).scale(cx(3.0, 0.0));
        let rep = TensorRep::new(matrix_space(1), vec![two], vec![three]).unwrap();
        assert!((h_upper(&rep).unwrap() - 6.0).abs() < 1e-12);

        let e11 = unit(2, 0, 0);
        let rep = TensorRep::new(matrix_space(2), vec![e11.clone()], vec![e11]).unwrap();
        assert!((h_upper(&rep).unwrap() - 1.0).abs() < 1e-12);

        assert_eq!(h_upper(&TensorRep::empty(matrix_space(2))).unwrap(), 0.0);
    }

    #[test]
    fn rebalance_scalar_example() {
        // x = [2], y = [1]: wh_upper drops from 2.5 to 2 at λ = 1/√2.
        let two = ComplexMatrix::identity(1).scale(cx(2.0, 0.0));
        let one = ComplexMatrix::identity(1);
        let rep = TensorRep::new(matrix_space(1), vec![two], vec![one]).unwrap();
        assert!((wh_upper(&rep).unwrap() - 2.5).abs() < 1e-12);
        let bal = rebalance(&rep).unwrap();
        assert!((wh_upper(&bal).unwrap() - 2.0).abs() < 1e-12);
        assert!(
            tensor_coefficients(&bal).max_abs_diff(&tensor_coefficients(&rep)) < 1e-10
        );
        // λ scales the left element by 1/√2.
        assert!((bal.lefts()[0].get(0, 0).re - 2.0 / 2f64.sqrt()).abs() < 1e-12);

        let zero = TensorRep::new(
            matrix_space(1),
            vec![ComplexMatrix::zeros(1, 1)],
            vec![ComplexMatrix::zeros(1, 1)],
        )
        .unwrap();
        let out = rebalance(&zero).unwrap();
        assert_eq!(out.lefts()[0].max_abs(), 0.0);
    }

    #[test]
    fn minimal_representation_drops_duplicates() {
        let mut rng = rng_from_seed(11);
        let x1 = random_matrix(&mut rng, 2, 2);
        let x2 = random_matrix(&mut rng, 2, 2);
        let y1 = random_matrix(&mut rng, 2, 2);
        // y2 = y1 engineered dependency.
        let rep = TensorRep::new(
            matrix_space(2),
            vec![x1.clone(), x2.clone()],
            vec![y1.clone(), y1.clone()],
        )
        .unwrap();
        let (min, warned) = minimal_representation(&rep).unwrap();
        assert!(!warned);
        assert_eq!(min.len(), 1);
        assert!(
            tensor_coefficients(&min).max_abs_diff(&tensor_coefficients(&rep)) < 1e-9
        );
        assert!(block_row_norm(&min).unwrap() <= block_row_norm(&rep).unwrap() + 1e-9);
    }

    #[test]
    fn minimal_representation_drops_zero_pairs() {
        let mut rng = rng_from_seed(12);
        let x = random_matrix(&mut rng, 2, 2);
        let y = random_matrix(&mut rng, 2, 2);
        let rep = TensorRep::new(
            matrix_space(2),
            vec![x.clone(), ComplexMatrix::zeros(2, 2)],
            vec![y.clone(), random_matrix(&mut rng, 2, 2)],
        )
        .unwrap();
        let (min, _) = minimal_representation(&rep).unwrap();
        assert_eq!(min.len(), 1);
        assert!(
            tensor_coefficients(&min).max_abs_diff(&tensor_coefficients(&rep)) < 1e-9
        );
    }

    #[test]
    fn minimal_representation_keeps_independent_reps() {
        let mut rng = rng_from_seed(13);
        let rep = TensorRep::new(
            matrix_space(2),
            vec![random_matrix(&mut rng, 2, 2), random_matrix(&mut rng, 2, 2)],
            vec![random_matrix(&mut rng, 2, 2), random_matrix(&mut rng, 2, 2)],
        )
        .unwrap();
        let (min, _) = minimal_representation(&rep).unwrap();
        assert_eq!(min.len(), 2);
        assert!(
            tensor_coefficients(&min).max_abs_diff(&tensor_coefficients(&rep)) < 1e-9
        );
        let before = block_row_norm(&rep).unwrap();
        let after = block_row_norm(&min).unwrap();
        assert!(after <= before + 1e-9);
    }

    #[test]
    fn conversion_scalar_example() {
        // (1, 1) scalars: Wh_upper of the converted form equals wh_upper = 1.
        let one = ComplexMatrix::identity(1);
        let rep = TensorRep::new(matrix_space(1), vec![one.clone()], vec![one]).unwrap();
        let wrep = wh_to_big_wh(&rep).unwrap();
        assert_eq!(wrep.xs().len(), 2);
        assert!((big_wh_upper(&wrep).unwrap() - 1.0).abs() < 1e-9);
        assert!((wh_upper(&rep).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            big_wh_coefficients(&wrep).max_abs_diff(&tensor_coefficients(&rep)) < 1e-12
        );
    }

    #[test]
    fn conversion_sandwich_on_random_reps() {
        let mut rng = rng_from_seed(21);
        for _ in 0..20 {
            let len = 1 + crate::sampling::random_index(&mut rng, 3);
            let lefts: Vec<_> = (0..len).map(|_| random_matrix(&mut rng, 2, 2)).collect();
            let rights: Vec<_> = (0..len).map(|_| random_matrix(&mut rng, 2, 2)).collect();
            let rep = TensorRep::new(matrix_space(2), lefts, rights).unwrap();
            let wrep = wh_to_big_wh(&rep).unwrap();
            assert!(big_wh_upper(&wrep).unwrap() <= wh_upper(&rep).unwrap() + 1e-9);
            assert!(
                big_wh_coefficients(&wrep).max_abs_diff(&tensor_coefficients(&rep)) < 1e-8
            );
        }
    }

    #[test]
    fn weighted_to_plain_example() {
        // α = [[0,2],[0,0]], xs = [e11, e22]: tensor 2·e11 ⊗ e22,
        // Wh_upper = ‖e11+e22‖·w = 1.
        let e11 = unit(2, 0, 0);
        let e22 = unit(2, 1, 1);
        let mut alpha = ComplexMatrix::zeros(2, 2);
        alpha.set(0, 1, cx(2.0, 0.0));
        let wrep = WhRep::new(matrix_space(2), vec![e11, e22], alpha).unwrap();
        let upper = big_wh_upper(&wrep).unwrap();
        assert!((upper - 1.0).abs() < 1e-9);

        let rep = big_wh_to_wh(&wrep, 1e-8).unwrap();
        assert!(
            big_wh_coefficients(&wrep).max_abs_diff(&tensor_coefficients(&rep)) < 1e-8
        );
        assert!(wh_upper(&rep).unwrap() <= upper * (1.0 + 1e-6));
    }

    #[test]
    fn weighted_scalar_identity() {
        let one = ComplexMatrix::identity(1);
        let alpha = ComplexMatrix::identity(1);
        let wrep = WhRep::new(matrix_space(1), vec![one], alpha).unwrap();
        let rep = big_wh_to_wh(&wrep, 1e-8).unwrap();
        assert!(wh_upper(&rep).unwrap() <= 1.0 + 1e-6);
        let u = tensor_coefficients(&rep);
        assert!((u.get(0, 0) - cx(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn weighted_upper_examples() {
        // xs = [1] scalar, α = [2] → 2.
        let one = ComplexMatrix::identity(1);
        let two = ComplexMatrix::identity(1).scale(cx(2.0, 0.0));
        let wrep = WhRep::new(matrix_space(1), vec![one], two).unwrap();
        assert!((big_wh_upper(&wrep).unwrap() - 2.0).abs() < 1e-9);
        // α = 0 → 0.
        let wrep = WhRep::new(
            matrix_space(1),
            vec![ComplexMatrix::identity(1)],
            ComplexMatrix::zeros(1, 1),
        )
        .unwrap();
        assert_eq!(big_wh_upper(&wrep).unwrap(), 0.0);
    }

    #[test]
    fn empty_conversions() {
        let rep = TensorRep::empty(matrix_space(2));
        let wrep = wh_to_big_wh(&rep).unwrap();
        assert_eq!(big_wh_upper(&wrep).unwrap(), 0.0);
        let back = big_wh_to_wh(&wrep, 1e-8).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn tensor_rep_json_round_trip() {
        let mut rng = rng_from_seed(5);
        let rep = TensorRep::new(
            matrix_space(2),
            vec![random_matrix(&mut rng, 2, 2)],
            vec![random_matrix(&mut rng, 2, 2)],
        )
        .unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        let back: TensorRep = serde_json::from_str(&text).unwrap();
        assert_eq!(rep, back);
        assert!(text.contains("\"kind\":\"matrix\""));
    }
}
