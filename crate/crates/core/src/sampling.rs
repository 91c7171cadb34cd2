//! Seeded random generators for test batteries and sampling-based bounds.
//!
//! Everything is driven by a ChaCha stream so identical seeds reproduce
//! identical instances byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::linalg::{cx, ComplexMatrix, HermitianMatrix, C64};

/// Deterministic RNG used across the crate.
pub type SeededRng = ChaCha12Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian via Box-Muller.
pub fn random_c64(rng: &mut SeededRng) -> C64 {
    let u1: f64 = rng.random::<f64>().max(1e-16);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let phi = 2.0 * std::f64::consts::PI * u2;
    cx(
        r * phi.cos() / 2f64.sqrt(),
        r * phi.sin() / 2f64.sqrt(),
    )
}

pub fn random_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| random_c64(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("gaussian entries are finite")
}

pub fn random_real_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| cx(random_c64(rng).re * 2f64.sqrt(), 0.0))
        .collect();
    ComplexMatrix::new(rows, cols, data).expect("gaussian entries are finite")
}

pub fn random_hermitian(rng: &mut SeededRng, n: usize) -> HermitianMatrix {
    let g = random_matrix(rng, n, n);
    let h = g.add(&g.adjoint()).scale(cx(0.5, 0.0));
    HermitianMatrix::from_matrix(&h, 1e-9).expect("symmetrized matrix is Hermitian")
}

pub fn random_psd(rng: &mut SeededRng, n: usize) -> HermitianMatrix {
    let g = random_matrix(rng, n, n);
    let p = g.matmul(&g.adjoint());
    HermitianMatrix::from_matrix(&p, 1e-9 * (1.0 + p.max_abs())).expect("Gram matrix is Hermitian")
}

/// Haar-ish unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        for k in 0..j {
            let proj: C64 = cols[k]
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            for i in 0..n {
                let sub = cols[k][i] * proj;
                cols[j][i] -= sub;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm.max(1e-300);
        }
    }
    let mut u = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            u.set(i, j, cols[j][i]);
        }
    }
    u
}

/// Normal matrix `U diag(d) U†` with random complex diagonal.
pub fn random_normal_matrix(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    let u = random_unitary(rng, n);
    let d = ComplexMatrix::diagonal(&(0..n).map(|_| random_c64(rng)).collect::<Vec<_>>());
    u.matmul(&d).matmul(&u.adjoint())
}

/// Uniform integer in `0..bound`.
pub fn random_index(rng: &mut SeededRng, bound: usize) -> usize {
    rng.random_range(0..bound)
}

/// Uniform f64 in `[0, 1)`.
pub fn random_unit(rng: &mut SeededRng) -> f64 {
    rng.random()
}
