//! Run configuration: tolerances, seed, iteration caps.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Relative tolerance for certified values.
    pub tol: f64,
    /// Seed for every sampled battery; NRH_SEED overrides.
    pub seed: u64,
    /// Bisection step cap.
    pub bisect_cap: usize,
    /// Inner iteration cap per feasibility query.
    pub inner_cap: usize,
    /// Default family spec for commands that take one.
    pub family: Option<String>,
    /// Optional output path; stdout when absent.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            seed: 1,
            bisect_cap: 60,
            inner_cap: 2000,
            family: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.tol > 0.0) {
            return Err("tol must be positive".into());
        }
        if self.bisect_cap == 0 || self.inner_cap == 0 {
            return Err("iteration caps must be at least 1".into());
        }
        Ok(())
    }

    /// Apply the NRH_SEED environment override.
    pub fn with_env_seed(mut self) -> Self {
        if let Ok(s) = std::env::var("NRH_SEED") {
            if let Ok(seed) = s.trim().parse::<u64>() {
                self.seed = seed;
            }
        }
        self
    }

    pub fn dual_options(&self) -> nrh_core::DualOptions {
        nrh_core::DualOptions {
            tol: self.tol,
            tol_feas: nrh_core::duality::TOL_FEAS,
            bisect_cap: self.bisect_cap,
            inner_cap: self.inner_cap,
        }
    }
}
