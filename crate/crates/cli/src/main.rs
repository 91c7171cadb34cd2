use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use nrh_cli::commands::{
    cmd_ando, cmd_dual, cmd_factorize, cmd_norm, cmd_numrad, cmd_pi2, cmd_schur, cmd_verify,
    cmd_wtensor, CliError,
};
use nrh_cli::config::RunConfig;

/// Numerical-radius Haagerup norms: bounds, dual certificates, square
/// factorizations, Schur multipliers, and the verification harness.
#[derive(Parser)]
#[command(name = "nrh", version, about)]
struct Cli {
    /// Merge settings from a JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Numerical radius of a square matrix.
    Numrad { matrix: PathBuf },
    /// Ando witness certification for w(alpha) <= 1.
    Ando {
        matrix: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Representation norm bounds (h, wh, whp on plain reps; Wh on weighted).
    Norm {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        rep: PathBuf,
        /// Reduce to independent families and rebalance first.
        #[arg(long)]
        minimize: bool,
    },
    /// Certified dual norm by state domination.
    Dual {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        variant: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Sampled lower bound via w(T ⊗ alpha).
    Wtensor {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Explicit square factorization through Hilbert space.
    Factorize {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        variant: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// 2-summing norm with its Pietsch measure.
    Pi2 {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        family: String,
    },
    /// Numerical-radius Schur multiplier bounds.
    Schur {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long, default_value = "real")]
        field: String,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run a verification suite (or all of them).
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    let mut config = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::Input(format!(
                    "{}: parse error at line {} column {}: {e}",
                    p.display(),
                    e.line(),
                    e.column()
                ))
            })?
        }
        None => RunConfig::default(),
    };
    config = config.with_env_seed();
    config.validate().map_err(CliError::Input)?;
    Ok(config)
}

fn emit(config: &RunConfig, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string(value).map_err(|e| CliError::Internal(e.to_string()))?;
    match &config.output {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Internal(format!("cannot write output: {e}"))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let mut config = load_config(&cli.config)?;
    let value = match cli.command {
        Command::Numrad { matrix } => cmd_numrad(&matrix)?,
        Command::Ando { matrix, tol } => cmd_ando(&matrix, tol)?,
        Command::Norm { kind, rep, minimize } => cmd_norm(&kind, &rep, minimize)?,
        Command::Dual { form, variant, tol } => {
            if let Some(t) = tol {
                config.tol = t;
            }
            config.validate().map_err(CliError::Input)?;
            cmd_dual(&form, &variant, &config)?
        }
        Command::Wtensor {
            form,
            alpha,
            trials,
            seed,
        } => {
            if let Some(s) = seed {
                config.seed = s;
            }
            config = config.with_env_seed();
            cmd_wtensor(&form, &alpha, trials, config.seed)?
        }
        Command::Factorize { form, variant, tol } => {
            if let Some(t) = tol {
                config.tol = t;
            }
            config.validate().map_err(CliError::Input)?;
            cmd_factorize(&form, &variant, &config)?
        }
        Command::Pi2 { map, family } => cmd_pi2(&map, &family)?,
        Command::Schur {
            alpha,
            field,
            trials,
            seed,
            tol,
        } => {
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(t) = tol {
                config.tol = t;
            }
            config = config.with_env_seed();
            config.validate().map_err(CliError::Input)?;
            cmd_schur(&alpha, &field, trials, config.seed, &config)?
        }
        Command::Verify { suite, seed, tol } => {
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(t) = tol {
                config.tol = t;
            }
            config = config.with_env_seed();
            config.validate().map_err(CliError::Input)?;
            let (value, passed) = cmd_verify(&suite, &config)?;
            emit(&config, &value)?;
            return Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
    };
    emit(&config, &value)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => match err {
            CliError::Soft(payload) => {
                println!("{payload}");
                ExitCode::from(3)
            }
            CliError::Input(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Internal(msg) => {
                eprintln!("internal error: {msg}");
                ExitCode::from(1)
            }
        },
    }
}
