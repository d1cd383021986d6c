//! Pass/fail reports shared by every law verifier.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one law over all of its enumerated instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawCheck {
    pub law: String,
    pub status: Status,
    pub instances: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl LawCheck {
    pub fn pass(law: impl Into<String>, instances: u64) -> Self {
        LawCheck {
            law: law.into(),
            status: Status::Pass,
            instances,
            witness: None,
        }
    }

    pub fn fail(law: impl Into<String>, instances: u64, witness: Value) -> Self {
        LawCheck {
            law: law.into(),
            status: Status::Fail,
            instances,
            witness: Some(witness),
        }
    }

    /// Builds a check from the first violation found, if any.
    pub fn from_search(law: impl Into<String>, instances: u64, violation: Option<Value>) -> Self {
        match violation {
            None => LawCheck::pass(law, instances),
            Some(w) => LawCheck::fail(law, instances, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// An ordered list of law checks. Order is meaningful: checks appear from the
/// most primitive law to the most specific.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(check: LawCheck) -> Self {
        LawReport {
            checks: vec![check],
        }
    }

    pub fn push(&mut self, check: LawCheck) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: LawReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(LawCheck::passed)
    }

    pub fn first_failure(&self) -> Option<&LawCheck> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn get(&self, law: &str) -> Option<&LawCheck> {
        self.checks.iter().find(|c| c.law == law)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}
