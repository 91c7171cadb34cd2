//! End-to-end behavior of the `nrh` binary: output schemas, exit codes, and
//! configuration plumbing.

use std::path::PathBuf;
use std::process::{Command, Output};

fn nrh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrh"))
        .args(args)
        .env_remove("NRH_SEED")
        .output()
        .expect("binary runs")
}

fn write_tmp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("nrh-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn numrad_jordan_cell() {
    let path = write_tmp("j2.json", r#"{"rows":2,"cols":2,"re":[0,1,0,0],"im":[0,0,0,0]}"#);
    let out = nrh(&["numrad", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["w"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn norm_of_empty_rep_is_zero() {
    let path = write_tmp(
        "empty_rep.json",
        r#"{"space":{"kind":"matrix","n":2},"pairs":[]}"#,
    );
    for kind in ["h", "wh", "whp"] {
        let out = nrh(&["norm", "--kind", kind, "--rep", path.to_str().unwrap()]);
        assert!(out.status.success());
        assert_eq!(stdout_json(&out)["value"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn norm_minimize_reports_reduction() {
    let path = write_tmp(
        "dup_rep.json",
        r#"{"space":{"kind":"matrix","n":1},
            "pairs":[{"x":{"rows":1,"cols":1,"re":[1],"im":[0]},
                      "y":{"rows":1,"cols":1,"re":[1],"im":[0]}},
                     {"x":{"rows":1,"cols":1,"re":[2],"im":[0]},
                      "y":{"rows":1,"cols":1,"re":[1],"im":[0]}}]}"#,
    );
    let out = nrh(&[
        "norm",
        "--kind",
        "wh",
        "--rep",
        path.to_str().unwrap(),
        "--minimize",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    // 1⊗1 + 2⊗1 = 3·(1⊗1): wh bound after reduction and balancing is 3.
    assert!((v["value"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert_eq!(v["minimized"], serde_json::json!(true));
}

#[test]
fn malformed_json_exits_2_with_position() {
    let path = write_tmp("bad.json", "{\"rows\":2,\n  broken");
    let out = nrh(&["numrad", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "diagnostics missing position: {err}");
}

#[test]
fn unknown_suite_exits_2() {
    let out = nrh(&["verify", "--suite", "thm99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_variant_exits_2() {
    let form = write_tmp(
        "form1.json",
        r#"{"space":{"kind":"min","builtin":"l1:2"},
            "coeffs":{"rows":2,"cols":2,"re":[1,0,0,1],"im":[0,0,0,0]}}"#,
    );
    let out = nrh(&["dual", "--form", form.to_str().unwrap(), "--variant", "vh"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dual_certificate_schema() {
    let form = write_tmp(
        "form2.json",
        r#"{"space":{"kind":"min","builtin":"l1:2"},
            "coeffs":{"rows":2,"cols":2,"re":[1,0,0,-0.5],"im":[0,0.25,0,0]}}"#,
    );
    let out = nrh(&["dual", "--form", form.to_str().unwrap(), "--variant", "wH"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["status"], serde_json::json!("converged"));
    assert_eq!(v["variant"], serde_json::json!("wH"));
    assert!(v["value"].as_f64().unwrap() > 0.0);
    assert!(v["state"]["p"].as_array().unwrap().len() == 4);
}

#[test]
fn ando_witness_and_infeasible_schema() {
    let good = write_tmp("a_half.json", r#"{"rows":2,"cols":2,"re":[0,1,0,0],"im":[0,0,0,0]}"#);
    let out = nrh(&["ando", good.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["status"], serde_json::json!("witness"));
    assert!(v["lambda_min"].as_f64().unwrap() >= -1e-8);

    let big = write_tmp(
        "a_big.json",
        r#"{"rows":2,"cols":2,"re":[1.5,0,0,1.5],"im":[0,0,0,0]}"#,
    );
    let out = nrh(&["ando", big.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["status"], serde_json::json!("infeasible"));
    assert!((v["w"].as_f64().unwrap() - 1.5).abs() < 1e-8);
}

#[test]
fn pi2_identity_with_builtin_family() {
    let map = write_tmp(
        "id3.json",
        r#"{"rows":3,"cols":3,"re":[1,0,0,0,1,0,0,0,1],"im":[0,0,0,0,0,0,0,0,0]}"#,
    );
    let out = nrh(&["pi2", "--map", map.to_str().unwrap(), "--family", "l1:3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["pi2"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let measure: Vec<f64> = v["measure"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((measure.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

#[test]
fn schur_brackets_scaled_jordan() {
    let alpha = write_tmp(
        "alpha2.json",
        r#"{"rows":2,"cols":2,"re":[0,2,0,0],"im":[0,0,0,0]}"#,
    );
    let out = nrh(&[
        "schur",
        "--alpha",
        alpha.to_str().unwrap(),
        "--trials",
        "40",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let lower = v["lower"].as_f64().unwrap();
    let upper = v["upper"].as_f64().unwrap();
    assert!(lower >= 2.0 - 1e-9);
    assert!(upper >= lower - 1e-3);
}

#[test]
fn config_file_and_env_seed() {
    let config = write_tmp("config.json", r#"{"seed": 9, "tol": 1e-6}"#);
    let out = nrh(&[
        "--config",
        config.to_str().unwrap(),
        "verify",
        "--suite",
        "prop21",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["seed"], serde_json::json!(9));

    let out = Command::new(env!("CARGO_BIN_EXE_nrh"))
        .args(["verify", "--suite", "prop21", "--seed", "3"])
        .env("NRH_SEED", "17")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["seed"], serde_json::json!(17));
}

#[test]
fn wtensor_is_seed_deterministic() {
    let form = write_tmp(
        "form3.json",
        r#"{"space":{"kind":"min","builtin":"l1:2"},
            "coeffs":{"rows":2,"cols":2,"re":[0.3,0.1,-0.2,0.9],"im":[0,0.4,0,0]}}"#,
    );
    let alpha = write_tmp(
        "alpha_j.json",
        r#"{"rows":2,"cols":2,"re":[0,2,0,0],"im":[0,0,0,0]}"#,
    );
    let args = [
        "wtensor",
        "--form",
        form.to_str().unwrap(),
        "--alpha",
        alpha.to_str().unwrap(),
        "--trials",
        "30",
        "--seed",
        "7",
    ];
    let a = nrh(&args);
    let b = nrh(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn factorize_outputs_reconstruction_data() {
    let form = write_tmp(
        "form4.json",
        r#"{"space":{"kind":"min","builtin":"l1:2"},
            "coeffs":{"rows":2,"cols":2,"re":[1,1,1,1],"im":[0,0,0,0]}}"#,
    );
    let out = nrh(&[
        "factorize",
        "--form",
        form.to_str().unwrap(),
        "--variant",
        "wH",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["kind"], serde_json::json!("transpose"));
    assert!(v["residual"].as_f64().unwrap() <= 1e-6 * 2.0);
    let product = v["a_norm"].as_f64().unwrap().powi(2) * v["b_norm"].as_f64().unwrap();
    assert!(product <= v["certified_value"].as_f64().unwrap() * (1.0 + 1e-3));
}
