//! Subcommand implementations. Each returns a JSON value for stdout or a
//! typed error that maps onto the exit-code contract: 2 for invalid input,
//! 3 for honest non-convergence or ambiguity, 1 for internal faults.

use std::path::Path;

use serde_json::{json, Value};

use nrh_core::duality::{dual_norm_with, BilinearForm, DualOutcome, Variant};
use nrh_core::factorize::{banach_factorize, gns_factorize, pietsch_pi2};
use nrh_core::linalg::ComplexMatrix;
use nrh_core::minspace::FunctionalFamily;
use nrh_core::numrad::{ando_witness, numerical_radius, AndoOutcome};
use nrh_core::reps::{
    big_wh_upper, h_upper, minimal_representation, rebalance, wh_upper, whp_upper, Space,
    TensorRep, WhRep,
};
use nrh_core::schur::{schur_w_lower, schur_w_upper, ScalarField, SchurInstance};
use nrh_core::{w_tensor_lower, Error};

use crate::config::RunConfig;
use crate::report::SuiteReport;
use crate::suites::{run_suite, SUITE_NAMES};

#[derive(Debug)]
pub enum CliError {
    /// Malformed or unsupported input: exit code 2.
    Input(String),
    /// Honest refusal (non-convergence, ambiguous boundary): exit 3 with a
    /// JSON payload.
    Soft(Value),
    /// Internal fault: exit 1.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Soft(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

fn from_core(err: Error) -> CliError {
    match err {
        Error::AmbiguousBoundary {
            w,
            lambda_min,
            ref beta,
        } => CliError::Soft(json!({
            "status": "ambiguous",
            "w": w,
            "lambda_min": lambda_min,
            "beta": beta,
        })),
        Error::Shape(_)
        | Error::InvalidInput(_)
        | Error::NegativeInput
        | Error::EmptyFamily
        | Error::DimensionCap { .. }
        | Error::NotPsd { .. }
        | Error::ZeroRadius
        | Error::Unbounded => CliError::Input(err.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "{}: parse error at line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn family_from_arg(arg: &str) -> Result<FunctionalFamily, CliError> {
    match FunctionalFamily::from_spec(arg) {
        Ok(f) => Ok(f),
        Err(spec_err) => {
            let path = Path::new(arg);
            if path.exists() {
                load_json(path)
            } else {
                Err(CliError::Input(spec_err.to_string()))
            }
        }
    }
}

/// Attach the approximation label mandated for inexact families.
fn family_label(space: &Space, dual_side: bool, out: &mut Value) {
    if let Space::Min { family } = space {
        if !family.exact() {
            let label = if dual_side {
                "upper-approximation of the dual norm (inexact family)"
            } else {
                "lower-approximation of the sup (inexact family)"
            };
            out["approximation"] = json!(label);
        }
    }
}

pub fn cmd_numrad(matrix_path: &Path) -> Result<Value, CliError> {
    let m: ComplexMatrix = load_json(matrix_path)?;
    let w = numerical_radius(&m).map_err(from_core)?;
    Ok(json!({ "w": w }))
}

pub fn cmd_ando(matrix_path: &Path, tol: f64) -> Result<Value, CliError> {
    let m: ComplexMatrix = load_json(matrix_path)?;
    let w = numerical_radius(&m).map_err(from_core)?;
    match ando_witness(&m, tol).map_err(from_core)? {
        AndoOutcome::Witness(wit) => Ok(json!({
            "status": "witness",
            "w": w,
            "beta": wit.beta,
            "lambda_min": wit.lambda_min,
        })),
        AndoOutcome::Infeasible { w } => Ok(json!({
            "status": "infeasible",
            "w": w,
        })),
    }
}

pub fn cmd_norm(kind: &str, rep_path: &Path, minimize: bool) -> Result<Value, CliError> {
    if kind == "Wh" {
        if minimize {
            return Err(CliError::Input(
                "--minimize applies to plain representations, not weighted ones".into(),
            ));
        }
        let rep: WhRep = load_json(rep_path)?;
        let value = big_wh_upper(&rep).map_err(from_core)?;
        let mut out = json!({ "kind": kind, "value": value });
        family_label(rep.space(), false, &mut out);
        return Ok(out);
    }
    let rep: TensorRep = load_json(rep_path)?;
    let (rep, warned) = if minimize {
        let (min, warned) = minimal_representation(&rep).map_err(from_core)?;
        (rebalance(&min).map_err(from_core)?, warned)
    } else {
        (rep, false)
    };
    let value = match kind {
        "h" => h_upper(&rep),
        "wh" => wh_upper(&rep),
        "whp" => whp_upper(&rep),
        other => return Err(CliError::Input(format!("unknown norm kind `{other}`"))),
    }
    .map_err(from_core)?;
    let mut out = json!({ "kind": kind, "value": value });
    if minimize {
        out["minimized"] = json!(true);
        if warned {
            out["rank_warning"] = json!(true);
        }
    }
    family_label(rep.space(), false, &mut out);
    Ok(out)
}

pub fn cmd_dual(
    form_path: &Path,
    variant: &str,
    config: &RunConfig,
) -> Result<Value, CliError> {
    let t: BilinearForm = load_json(form_path)?;
    let variant = Variant::parse(variant).map_err(from_core)?;
    match dual_norm_with(&t, variant, &config.dual_options()).map_err(from_core)? {
        DualOutcome::Converged(cert) => {
            let mut out = serde_json::to_value(&cert)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            out["status"] = json!("converged");
            family_label(t.space(), true, &mut out);
            Ok(out)
        }
        DualOutcome::NotConverged { c_lo, c_hi } => Err(CliError::Soft(json!({
            "status": "not_converged",
            "c_lo": c_lo,
            "c_hi": c_hi,
        }))),
    }
}

pub fn cmd_wtensor(
    form_path: &Path,
    alpha_path: &Path,
    trials: usize,
    seed: u64,
) -> Result<Value, CliError> {
    let t: BilinearForm = load_json(form_path)?;
    let alpha: ComplexMatrix = load_json(alpha_path)?;
    let w_alpha = numerical_radius(&alpha).map_err(from_core)?;
    let lower = w_tensor_lower(&t, &alpha, trials, seed).map_err(from_core)?;
    let mut out = json!({
        "lower": lower,
        "w_alpha": w_alpha,
        "trials": trials,
        "seed": seed,
    });
    family_label(t.space(), false, &mut out);
    Ok(out)
}

pub fn cmd_factorize(
    form_path: &Path,
    variant: &str,
    config: &RunConfig,
) -> Result<Value, CliError> {
    let t: BilinearForm = load_json(form_path)?;
    let variant = Variant::parse(variant).map_err(from_core)?;
    let (fact, value) = match variant {
        Variant::WH => {
            let cert = match dual_norm_with(&t, variant, &config.dual_options())
                .map_err(from_core)?
            {
                DualOutcome::Converged(c) => c,
                DualOutcome::NotConverged { c_lo, c_hi } => {
                    return Err(CliError::Soft(json!({
                        "status": "not_converged", "c_lo": c_lo, "c_hi": c_hi,
                    })))
                }
            };
            (banach_factorize(&t, config.tol).map_err(from_core)?, cert.value)
        }
        _ => {
            let cert = match dual_norm_with(&t, variant, &config.dual_options())
                .map_err(from_core)?
            {
                DualOutcome::Converged(c) => c,
                DualOutcome::NotConverged { c_lo, c_hi } => {
                    return Err(CliError::Soft(json!({
                        "status": "not_converged", "c_lo": c_lo, "c_hi": c_hi,
                    })))
                }
            };
            (gns_factorize(&t, &cert).map_err(from_core)?, cert.value)
        }
    };
    let mut out =
        serde_json::to_value(&fact).map_err(|e| CliError::Internal(e.to_string()))?;
    out["certified_value"] = json!(value);
    family_label(t.space(), true, &mut out);
    Ok(out)
}

pub fn cmd_pi2(map_path: &Path, family_arg: &str) -> Result<Value, CliError> {
    let a: ComplexMatrix = load_json(map_path)?;
    let family = family_from_arg(family_arg)?;
    let (pi2, measure) = pietsch_pi2(&a, &family).map_err(from_core)?;
    let mut out = json!({ "pi2": pi2, "measure": measure });
    if !family.exact() {
        out["approximation"] = json!("upper-approximation of the dual norm (inexact family)");
    }
    Ok(out)
}

pub fn cmd_schur(
    alpha_path: &Path,
    field: &str,
    trials: usize,
    seed: u64,
    config: &RunConfig,
) -> Result<Value, CliError> {
    let alpha: ComplexMatrix = load_json(alpha_path)?;
    let field = match field {
        "real" => ScalarField::Real,
        "complex" => ScalarField::Complex,
        other => return Err(CliError::Input(format!("unknown field `{other}`"))),
    };
    let inst = SchurInstance::new(alpha, field).map_err(from_core)?;
    let lower = schur_w_lower(&inst, trials, seed).map_err(from_core)?;
    match schur_w_upper(&inst, config.tol).map_err(from_core)? {
        DualOutcome::Converged(cert) => {
            let mut out = json!({
                "upper": cert.value,
                "lower": lower,
                "gap": cert.value - lower,
                "certificate": cert,
            });
            if field == ScalarField::Complex {
                out["approximation"] =
                    json!("upper-approximation of the multiplier norm (grid family)");
            }
            Ok(out)
        }
        DualOutcome::NotConverged { c_lo, c_hi } => Err(CliError::Soft(json!({
            "status": "not_converged",
            "lower": lower,
            "c_lo": c_lo,
            "c_hi": c_hi,
        }))),
    }
}

pub fn cmd_verify(suite: &str, config: &RunConfig) -> Result<(Value, bool), CliError> {
    let names: Vec<&str> = if suite == "all" {
        SUITE_NAMES.to_vec()
    } else {
        if !SUITE_NAMES.contains(&suite) {
            return Err(CliError::Input(format!(
                "unknown suite `{suite}`; available: {} or all",
                SUITE_NAMES.join(", ")
            )));
        }
        vec![suite]
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for name in names {
        reports.push(run_suite(name, config).map_err(from_core)?);
    }
    let all_passed = reports.iter().all(|r| r.passed());
    let value = json!({
        "seed": config.seed,
        "suites": reports,
        "passed": all_passed,
    });
    Ok((value, all_passed))
}
