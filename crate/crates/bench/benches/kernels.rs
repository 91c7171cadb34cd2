use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use nrh_bench::{bench_boundary_alpha, bench_hermitian, bench_matrix, bench_min_form};
use nrh_core::duality::{dual_norm, Variant};
use nrh_core::factorize::pietsch_pi2;
use nrh_core::linalg::hermitian_eig;
use nrh_core::minspace::FunctionalFamily;
use nrh_core::numrad::{ando_witness, numerical_radius};

fn eig_bench(c: &mut Criterion) {
    let h = bench_hermitian(16);
    c.bench_function("hermitian_eig_16", |b| {
        b.iter(|| hermitian_eig(black_box(&h)).unwrap())
    });
}

fn radius_bench(c: &mut Criterion) {
    let m = bench_matrix(8);
    c.bench_function("numerical_radius_8", |b| {
        b.iter(|| numerical_radius(black_box(&m)).unwrap())
    });
}

fn ando_bench(c: &mut Criterion) {
    let alpha = bench_boundary_alpha(4);
    c.bench_function("ando_witness_boundary_4", |b| {
        b.iter(|| ando_witness(black_box(&alpha), 1e-6).unwrap())
    });
}

fn dual_bench(c: &mut Criterion) {
    let t = bench_min_form(3);
    c.bench_function("dual_norm_l1_3", |b| {
        b.iter(|| dual_norm(black_box(&t), Variant::WH, 1e-6).unwrap())
    });
}

fn pietsch_bench(c: &mut Criterion) {
    let family = FunctionalFamily::l1_sign(4).unwrap();
    let a = nrh_core::ComplexMatrix::identity(4);
    c.bench_function("pietsch_pi2_identity_4", |b| {
        b.iter(|| pietsch_pi2(black_box(&a), black_box(&family)).unwrap())
    });
}

criterion_group!(
    benches,
    eig_bench,
    radius_bench,
    ando_bench,
    dual_bench,
    pietsch_bench
);
criterion_main!(benches);
