//! Suite reports: deterministic, reloadable failure dumps.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureDump {
    /// Which check inside the suite tripped.
    pub check: String,
    /// Case index within the battery; rerunning the suite with the same seed
    /// reproduces the instance at this index.
    pub case: usize,
    /// Observed violation magnitude.
    pub violation: f64,
    /// Instance payload sufficient to rebuild the case.
    pub instance: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<FailureDump>,
    pub max_violation: f64,
    /// Informational notes (reported gaps that are not failures).
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64) -> Self {
        Self {
            suite: suite.to_string(),
            seed,
            cases: 0,
            failures: Vec::new(),
            max_violation: 0.0,
            notes: Vec::new(),
        }
    }

    /// Record one checked inequality: `violation` ≤ 0 passes.
    pub fn check(&mut self, check: &str, case: usize, violation: f64, instance: Value) {
        self.max_violation = self.max_violation.max(violation);
        if violation > 0.0 {
            self.failures.push(FailureDump {
                check: check.to_string(),
                case,
                violation,
                instance,
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}
