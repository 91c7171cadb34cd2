//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one pass/fail line. Batteries shared with the `verify` harness run once
//! per binary and are reused across criteria.

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::OnceLock;

use nrh_cli::config::RunConfig;
use nrh_cli::report::SuiteReport;
use nrh_cli::suites::run_suite;
use nrh_core::linalg::{cx, ComplexMatrix};
use nrh_core::numrad::numerical_radius;
use nrh_core::reps::{h_upper, rebalance, wh_upper, Space, TensorRep};
use nrh_core::sampling::{random_index, random_matrix, rng_from_seed};

fn suites() -> &'static BTreeMap<String, SuiteReport> {
    static CACHE: OnceLock<BTreeMap<String, SuiteReport>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let config = RunConfig::default();
        ["thm22", "prop21", "prop41", "prop42", "cor43", "schur"]
            .iter()
            .map(|name| {
                (
                    name.to_string(),
                    run_suite(name, &config).expect("suite runs"),
                )
            })
            .collect()
    })
}

fn assert_checks(criterion: &str, suite: &str, checks: &[&str]) {
    let report = &suites()[suite];
    let failures: Vec<_> = report
        .failures
        .iter()
        .filter(|f| checks.contains(&f.check.as_str()))
        .collect();
    if failures.is_empty() {
        println!("{criterion}: PASS — {} ({} cases)", checks.join(", "), report.cases);
    } else {
        println!("{criterion}: FAIL — {failures:?}");
        panic!("{criterion} failed: {failures:?}");
    }
}

#[test]
fn criterion_01_numerical_radius_anchors() {
    let jordan = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
    let w = numerical_radius(&jordan).unwrap();
    assert!(
        (w - 0.5).abs() <= 1e-8,
        "criterion 1: FAIL — w(J2) = {w}"
    );
    for n in 1..=6 {
        let w = numerical_radius(&ComplexMatrix::identity(n)).unwrap();
        assert!(
            (w - 1.0).abs() <= 1e-10,
            "criterion 1: FAIL — w(I_{n}) = {w}"
        );
    }
    println!("criterion 1: PASS — w(J2) = 0.5 ± 1e-8, w(I) = 1 ± 1e-10");
}

#[test]
fn criterion_02_ando_certification() {
    assert_checks(
        "criterion 2",
        "thm22",
        &[
            "witness_lambda_min",
            "witness_found",
            "refusal_radius",
            "no_false_witness",
        ],
    );
}

#[test]
fn criterion_03_norm_sandwich() {
    let mut rng = rng_from_seed(3003);
    for case in 0..300 {
        let n = 1 + case % 4;
        let len = 1 + random_index(&mut rng, 4);
        let rep = TensorRep::new(
            Space::Matrix { n },
            (0..len).map(|_| random_matrix(&mut rng, n, n)).collect(),
            (0..len).map(|_| random_matrix(&mut rng, n, n)).collect(),
        )
        .unwrap();
        let rep = rebalance(&rep).unwrap();
        let h = h_upper(&rep).unwrap();
        let wh = wh_upper(&rep).unwrap();
        assert!(
            0.5 * h - 1e-9 <= wh && wh <= h + 1e-9,
            "criterion 3: FAIL — case {case}: h = {h}, wh = {wh}"
        );
    }
    println!("criterion 3: PASS — ½·h − 1e-9 ≤ wh ≤ h + 1e-9 on 300 rebalanced reps");
}

#[test]
fn criterion_04_conversions() {
    assert_checks(
        "criterion 4",
        "thm22",
        &["forward_bound", "coefficients_preserved", "backward_bound"],
    );
}

#[test]
fn criterion_05_representation_reduction() {
    assert_checks(
        "criterion 5",
        "prop21",
        &["tensor_preserved", "row_norm_non_increasing", "full_rank_output"],
    );
}

#[test]
fn criterion_06_min_space_equalities() {
    assert_checks(
        "criterion 6",
        "prop41",
        &["wh_embed_equals_wH", "whp_embed_equals_wH"],
    );
}

#[test]
fn criterion_07_duality_loop() {
    assert_checks(
        "criterion 7",
        "cor43",
        &[
            "dual_converged",
            "banach_residual",
            "banach_kind",
            "pi2_squared_b_bound",
            "loop_closure",
            "w_tensor_below_dual",
            "dual_inequality",
        ],
    );
}

#[test]
fn criterion_08_two_summing() {
    assert_checks(
        "criterion 8",
        "prop42",
        &[
            "identity_pi2_is_one",
            "measure_normalized",
            "pietsch_certificate",
            "pi2_homogeneous",
            "cb_below_pi2",
            "cb_attainment_rate",
        ],
    );
    let notes = &suites()["prop42"].notes;
    if !notes.is_empty() {
        println!("criterion 8: reported gap instances: {notes:?}");
    }
}

#[test]
fn criterion_09_schur_multiplier() {
    assert_checks(
        "criterion 9",
        "schur",
        &[
            "identity_upper",
            "identity_lower",
            "jordan_lower",
            "jordan_bracket",
            "all_ones_upper",
            "diag_lower",
            "diag_upper",
            "lower_below_upper",
            "permutation_covariance",
        ],
    );
}

#[test]
fn criterion_10_determinism() {
    let bin = env!("CARGO_BIN_EXE_nrh");
    let run = || {
        Command::new(bin)
            .args(["verify", "--suite", "all", "--seed", "1"])
            .env_remove("NRH_SEED")
            .output()
            .expect("verify runs")
    };
    let first = run();
    let second = run();
    assert!(
        first.status.success(),
        "criterion 10: FAIL — verify exit {:?}: {}",
        first.status.code(),
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(
        first.stdout, second.stdout,
        "criterion 10: FAIL — reports differ between runs"
    );
    assert!(!first.stdout.is_empty());
    println!(
        "criterion 10: PASS — two full verify runs byte-identical ({} bytes)",
        first.stdout.len()
    );
}
