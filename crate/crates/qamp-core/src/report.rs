//! Machine-readable records of individual bound checks.
//!
//! Every inequality the crate verifies is reported as a [`CheckRecord`]:
//! the claimed relation as a neutral statement string, both sides as
//! numbers, the tolerance granted, and the resulting slack
//! `rhs + tol - lhs` (non-negative exactly when the check passes).

use serde::{Deserialize, Serialize};

/// Outcome of one checked inequality `lhs <= rhs + tol`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    /// Stable machine id, e.g. `"completeness.walks"`.
    pub id: String,
    /// Human-readable statement of the relation being checked.
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    /// `rhs + tol - lhs`; non-negative iff `pass`.
    pub slack: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// Record the check `lhs <= rhs + tol`.
    pub fn le(id: &str, statement: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs + tol - lhs;
        CheckRecord {
            id: id.to_string(),
            statement: statement.to_string(),
            lhs,
            rhs,
            tol,
            slack,
            pass: slack >= 0.0,
        }
    }

    /// Record the two-sided check `|lhs - rhs| <= tol`.
    pub fn eq(id: &str, statement: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = tol - (lhs - rhs).abs();
        CheckRecord {
            id: id.to_string(),
            statement: statement.to_string(),
            lhs,
            rhs,
            tol,
            slack,
            pass: slack >= 0.0,
        }
    }
}

/// A group of related check records with an aggregate verdict.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BoundReport {
    pub checks: Vec<CheckRecord>,
}

impl BoundReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    /// True when every contained check passed.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Ids of the failing checks.
    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_sign_matches_pass() {
        let ok = CheckRecord::le("a", "x <= y", 1.0, 1.0, 1e-9);
        assert!(ok.pass && ok.slack >= 0.0);
        let bad = CheckRecord::le("b", "x <= y", 2.0, 1.0, 1e-9);
        assert!(!bad.pass && bad.slack < 0.0);
        let eq = CheckRecord::eq("c", "x = y", 1.0 + 5e-10, 1.0, 1e-9);
        assert!(eq.pass);
    }
}
