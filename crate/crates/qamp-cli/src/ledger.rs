//! The verification ledger: one schema-versioned JSON document per run.
//!
//! A ledger carries the SHA-256 of every input file, the resolved
//! parameters, the extremal eigenvalues that were computed, and one
//! [`CheckRecord`] per asserted inequality.  The aggregate `pass` field is
//! true exactly when every record passes, which is also the condition for
//! exit code 0.

use std::collections::BTreeMap;

use serde::Serialize;

use qamp_core::{CheckRecord, IterationReport};

/// Version of the ledger document layout.
pub const LEDGER_SCHEMA_VERSION: u32 = 1;

/// Resolved command parameters; absent fields are omitted from the JSON.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubit_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<bool>,
}

/// One extremal eigenvalue with the method that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaRecord {
    pub value: f64,
    /// `"dense"`, `"diagonal"`, or `"lanczos"`.
    pub method: String,
    pub residual: f64,
}

/// Ground energies of the base Hamiltonian and each amplified variant.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LambdaSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<LambdaRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walks: Option<LambdaRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tensor: Option<LambdaRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_shot: Option<LambdaRecord>,
}

/// Outcome of a single `spectrum` run.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRecord {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub method: String,
    /// SHA-256 of the eigenvector's amplitudes, tying the value to the
    /// exact state that witnessed it.
    pub state_sha256: String,
}

/// The full ledger document.
#[derive(Debug, Serialize)]
pub struct VerificationLedger {
    pub schema_version: u32,
    pub command: String,
    /// Input name → SHA-256 of the raw file bytes.
    pub inputs: BTreeMap<String, String>,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iteration: Option<IterationReport>,
    pub checks: Vec<CheckRecord>,
    pub warnings: Vec<String>,
    /// True iff every check record passes.
    pub pass: bool,
}

impl VerificationLedger {
    pub fn new(command: &str) -> Self {
        VerificationLedger {
            schema_version: LEDGER_SCHEMA_VERSION,
            command: command.to_string(),
            inputs: BTreeMap::new(),
            params: Params::default(),
            lambda: None,
            spectrum: None,
            iteration: None,
            checks: Vec::new(),
            warnings: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        self.checks.extend(records);
    }

    /// Recompute the aggregate verdict from the records.
    pub fn finalise(&mut self) {
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    pub fn failing_ids(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.id.clone())
            .collect()
    }

    /// Fixed-width check table for `--format table`.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<44} {:>24} {:>24} {:>12} {:>6}\n",
            "check", "lhs", "rhs", "slack", "pass"
        ));
        for c in &self.checks {
            out.push_str(&format!(
                "{:<44} {:>24.16e} {:>24.16e} {:>12.3e} {:>6}\n",
                c.id,
                c.lhs,
                c.rhs,
                c.slack,
                if c.pass { "ok" } else { "FAIL" }
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out.push_str(&format!(
            "{}: {} of {} checks pass\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        ));
        out
    }

    /// One-line-per-check human summary for stderr.
    pub fn render_summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}: {} (slack {:.3e})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.statement,
                c.slack
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out.push_str(&format!(
            "{} — {} of {} checks pass\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        ));
        out
    }
}
