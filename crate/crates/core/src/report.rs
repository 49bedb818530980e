//! Machine-readable verification outcomes.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    InconclusiveAtoms,
    Exploratory,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub status: Status,
    /// Number of exact comparisons performed.
    pub checked: usize,
    /// Offending point with expected and obtained values, or summary data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl VerificationReport {
    pub fn pass(claim: impl Into<String>, checked: usize) -> Self {
        VerificationReport {
            claim: claim.into(),
            status: Status::Pass,
            checked,
            witness: None,
        }
    }

    pub fn fail(claim: impl Into<String>, checked: usize, witness: Value) -> Self {
        VerificationReport {
            claim: claim.into(),
            status: Status::Fail,
            checked,
            witness: Some(witness),
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Folds a list of sub-reports: the first failure wins, counts add up.
    pub fn combine(claim: impl Into<String>, parts: Vec<VerificationReport>) -> Self {
        let checked = parts.iter().map(|p| p.checked).sum();
        let claim = claim.into();
        if let Some(f) = parts.iter().find(|p| p.status == Status::Fail) {
            let mut w = serde_json::json!({ "part": f.claim });
            if let Some(inner) = &f.witness {
                w["witness"] = inner.clone();
            }
            let passed: Vec<&str> = parts
                .iter()
                .filter(|p| p.status == Status::Pass)
                .map(|p| p.claim.as_str())
                .collect();
            if !passed.is_empty() && passed.len() < 8 {
                w["passed"] = serde_json::json!(passed);
            }
            return Self::fail(claim, checked, w);
        }
        let status = if parts.iter().any(|p| p.status == Status::InconclusiveAtoms) {
            Status::InconclusiveAtoms
        } else if parts.iter().any(|p| p.status == Status::Exploratory) {
            Status::Exploratory
        } else {
            Status::Pass
        };
        VerificationReport {
            claim,
            status,
            checked,
            witness: None,
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::InconclusiveAtoms => "inconclusive-atoms",
            Status::Exploratory => "exploratory",
        };
        write!(f, "{s}: {} ({} checks)", self.claim, self.checked)?;
        if let Some(w) = &self.witness {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}
