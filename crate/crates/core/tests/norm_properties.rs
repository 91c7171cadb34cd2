//! Property batteries for the numerical radius and the representation norms.

use nrh_core::linalg::{cx, hermitian_eig, operator_norm, psd_sqrt, HermitianMatrix};
use nrh_core::reps::{
    block_row_norm, h_upper, minimal_representation, rebalance, tensor_coefficients, wh_upper,
    whp_upper, Space, TensorRep,
};
use nrh_core::sampling::{
    random_hermitian, random_index, random_matrix, random_normal_matrix, random_psd,
    random_unitary, rng_from_seed,
};
use nrh_core::numrad::numerical_radius;
use proptest::prelude::*;

fn random_rep(rng: &mut nrh_core::sampling::SeededRng, n: usize, max_len: usize) -> TensorRep {
    let len = 1 + random_index(rng, max_len);
    let lefts = (0..len).map(|_| random_matrix(rng, n, n)).collect();
    let rights = (0..len).map(|_| random_matrix(rng, n, n)).collect();
    TensorRep::new(Space::Matrix { n }, lefts, rights).unwrap()
}

#[test]
fn radius_operator_norm_sandwich_500() {
    let mut rng = rng_from_seed(1001);
    for trial in 0..500 {
        let n = 1 + trial % 8;
        let m = random_matrix(&mut rng, n, n);
        let w = numerical_radius(&m).unwrap();
        let nrm = operator_norm(&m);
        assert!(w <= nrm + 1e-7, "w = {w}, norm = {nrm}");
        assert!(nrm <= 2.0 * w + 1e-7, "w = {w}, norm = {nrm}");
    }
}

#[test]
fn radius_equals_norm_for_normal_matrices() {
    let mut rng = rng_from_seed(1002);
    for trial in 0..60 {
        let n = 2 + trial % 5;
        let m = random_normal_matrix(&mut rng, n);
        let w = numerical_radius(&m).unwrap();
        let nrm = operator_norm(&m);
        assert!((w - nrm).abs() <= 1e-7 * (1.0 + nrm), "w = {w}, norm = {nrm}");
    }
}

#[test]
fn radius_scales_homogeneously() {
    let mut rng = rng_from_seed(1003);
    for _ in 0..40 {
        let m = random_matrix(&mut rng, 4, 4);
        let w = numerical_radius(&m).unwrap();
        let c = 0.1 + 3.0 * nrh_core::sampling::random_unit(&mut rng);
        let ws = numerical_radius(&m.scale(cx(c, 0.0))).unwrap();
        assert!((ws - c * w).abs() <= 1e-9 * (1.0 + c * w).max(1.0) * (1.0 + w));
    }
}

#[test]
fn operator_norm_is_unitarily_invariant() {
    let mut rng = rng_from_seed(1004);
    for _ in 0..40 {
        let m = random_matrix(&mut rng, 4, 4);
        let u = random_unitary(&mut rng, 4);
        let v = random_unitary(&mut rng, 4);
        let a = operator_norm(&m);
        let b = operator_norm(&u.matmul(&m).matmul(&v));
        assert!((a - b).abs() <= 1e-10 * (1.0 + a));
    }
}

#[test]
fn eigenvalue_sum_matches_trace() {
    let mut rng = rng_from_seed(1005);
    for trial in 0..60 {
        let n = 1 + trial % 8;
        let h = random_hermitian(&mut rng, n);
        let (vals, _) = hermitian_eig(&h).unwrap();
        let sum: f64 = vals.iter().sum();
        assert!((sum - h.trace()).abs() <= 1e-10 * (1.0 + h.trace().abs()));
    }
}

#[test]
fn psd_sqrt_squares_back_100() {
    let mut rng = rng_from_seed(1006);
    for trial in 0..100 {
        let n = 1 + trial % 12;
        let p = random_psd(&mut rng, n);
        let s = psd_sqrt(&p).unwrap().to_matrix();
        let err = s.matmul(&s).max_abs_diff(&p.to_matrix());
        let scale = 1.0 + operator_norm(&p.to_matrix());
        assert!(err <= 1e-9 * scale, "err = {err} at n = {n}");
    }
}

#[test]
fn sandwich_half_h_wh_h_300() {
    let mut rng = rng_from_seed(1007);
    for trial in 0..300 {
        let n = 1 + trial % 4;
        let rep = rebalance(&random_rep(&mut rng, n, 4)).unwrap();
        let h = h_upper(&rep).unwrap();
        let wh = wh_upper(&rep).unwrap();
        assert!(0.5 * h - 1e-9 <= wh, "h = {h}, wh = {wh}");
        assert!(wh <= h + 1e-9, "h = {h}, wh = {wh}");
    }
}

#[test]
fn bounds_invariant_under_unitary_conjugation() {
    let mut rng = rng_from_seed(1008);
    for _ in 0..30 {
        let n = 3;
        let rep = random_rep(&mut rng, n, 3);
        let u = random_unitary(&mut rng, n);
        let conj = |m: &nrh_core::ComplexMatrix| u.matmul(m).matmul(&u.adjoint());
        let rep_u = TensorRep::new(
            rep.space().clone(),
            rep.lefts().iter().map(conj).collect(),
            rep.rights().iter().map(conj).collect(),
        )
        .unwrap();
        for (a, b) in [
            (wh_upper(&rep).unwrap(), wh_upper(&rep_u).unwrap()),
            (whp_upper(&rep).unwrap(), whp_upper(&rep_u).unwrap()),
            (h_upper(&rep).unwrap(), h_upper(&rep_u).unwrap()),
        ] {
            assert!((a - b).abs() <= 1e-8 * (1.0 + a), "{a} vs {b}");
        }
    }
}

#[test]
fn minimal_representation_battery_with_dependencies() {
    let mut rng = rng_from_seed(1009);
    for trial in 0..120 {
        let n = 2 + trial % 3;
        let base = random_rep(&mut rng, n, 3);
        // Engineer a dependency: append a pair whose right element is a
        // combination of existing rights.
        let mut lefts = base.lefts().to_vec();
        let mut rights = base.rights().to_vec();
        let mix = rights
            .iter()
            .fold(nrh_core::ComplexMatrix::zeros(n, n), |acc, y| {
                acc.add(&y.scale(cx(0.5, -0.25)))
            });
        lefts.push(random_matrix(&mut rng, n, n));
        rights.push(mix);
        if trial % 2 == 0 {
            // And a duplicated left element.
            lefts.push(lefts[0].clone());
            rights.push(random_matrix(&mut rng, n, n));
        }
        let rep = TensorRep::new(Space::Matrix { n }, lefts, rights).unwrap();
        let (min, _) = minimal_representation(&rep).unwrap();
        let err = tensor_coefficients(&min).max_abs_diff(&tensor_coefficients(&rep));
        let scale = 1.0 + tensor_coefficients(&rep).max_abs();
        assert!(err <= 1e-9 * scale, "coefficients drifted by {err}");
        assert!(
            block_row_norm(&min).unwrap() <= block_row_norm(&rep).unwrap() + 1e-9,
            "row norm grew"
        );
        assert!(min.len() < rep.len(), "dependency was not removed");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rebalance_preserves_tensor_and_never_hurts(seed in 0u64..10_000) {
        let mut rng = rng_from_seed(seed);
        let n = 1 + random_index(&mut rng, 3);
        let rep = random_rep(&mut rng, n, 3);
        let bal = rebalance(&rep).unwrap();
        let drift = tensor_coefficients(&bal).max_abs_diff(&tensor_coefficients(&rep));
        prop_assert!(drift <= 1e-10 * (1.0 + tensor_coefficients(&rep).max_abs()));
        let scale = 1.0 + wh_upper(&rep).unwrap();
        prop_assert!(wh_upper(&bal).unwrap() <= wh_upper(&rep).unwrap() + 1e-9 * scale);
        prop_assert!(wh_upper(&bal).unwrap() <= h_upper(&rep).unwrap() + 1e-9 * scale);
    }

    #[test]
    fn radius_of_diagonal_is_max_modulus(re in prop::collection::vec(-3.0f64..3.0, 1..6)) {
        let diag: Vec<_> = re.iter().map(|&r| cx(r, -0.5 * r)).collect();
        let m = nrh_core::ComplexMatrix::diagonal(&diag);
        let w = numerical_radius(&m).unwrap();
        let expect = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((w - expect).abs() < 1e-9 * (1.0 + expect));
    }

    #[test]
    fn psd_sqrt_is_hermitian_psd(seed in 0u64..10_000) {
        let mut rng = rng_from_seed(seed);
        let n = 1 + random_index(&mut rng, 6);
        let p = random_psd(&mut rng, n);
        let s = psd_sqrt(&p).unwrap();
        let (vals, _) = hermitian_eig(&s).unwrap();
        prop_assert!(vals.iter().all(|&v| v >= -1e-10));
        let _ = HermitianMatrix::from_matrix(&s.to_matrix(), 1e-12).unwrap();
    }
}
