//! Shared instance builders for the kernel benchmarks.

use std::sync::Arc;

use nrh_core::duality::BilinearForm;
use nrh_core::linalg::{ComplexMatrix, HermitianMatrix};
use nrh_core::minspace::FunctionalFamily;
use nrh_core::reps::Space;
use nrh_core::sampling::{random_hermitian, random_matrix, rng_from_seed};

pub fn bench_hermitian(n: usize) -> HermitianMatrix {
    let mut rng = rng_from_seed(0xBE7C);
    random_hermitian(&mut rng, n)
}

pub fn bench_matrix(n: usize) -> ComplexMatrix {
    let mut rng = rng_from_seed(0xBE7C + 1);
    random_matrix(&mut rng, n, n)
}

pub fn bench_min_form(dim: usize) -> BilinearForm {
    let mut rng = rng_from_seed(0xBE7C + 2);
    let family = Arc::new(FunctionalFamily::l1_sign(dim).expect("family"));
    BilinearForm::new(Space::Min { family }, random_matrix(&mut rng, dim, dim)).expect("form")
}

pub fn bench_boundary_alpha(n: usize) -> ComplexMatrix {
    let mut rng = rng_from_seed(0xBE7C + 3);
    let m = random_matrix(&mut rng, n, n);
    let w = nrh_core::numerical_radius(&m).expect("radius");
    m.scale(nrh_core::cx(1.0 / w, 0.0))
}
