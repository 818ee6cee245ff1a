//! Command implementations behind the `uncontentious` binary.
//!
//! Each command returns a [`Report`]: a JSON document with a `"kind"` discriminator, the
//! SHA-256 of its inputs, the seed and library version, human-readable lines, and a status
//! that maps onto the process exit code.

mod offline;
mod online;
mod suite;

pub use offline::{alpha_report, cmd_alpha, cmd_improving, improving_report};
pub use online::{cmd_online, online_report, OnlineOverrides};
pub use suite::{cmd_examples, suite_checks};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Outcome class, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    CheckFailure,
    InputError,
    ResourceCap,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::CheckFailure => 1,
            Status::InputError => 2,
            Status::ResourceCap => 3,
        }
    }

    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::GroundSetTooLarge { .. } | Error::CapExceeded(_) => Status::ResourceCap,
            Error::NonConvergence(_) => Status::CheckFailure,
            _ => Status::InputError,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.pass { "pass" } else { "fail" };
        if self.detail.is_empty() {
            format!("{}: {verdict}", self.name)
        } else {
            format!("{}: {verdict} ({})", self.name, self.detail)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub kind: &'static str,
    pub version: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs_sha256: String,
    pub lines: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(flatten)]
    pub body: Map<String, Value>,
}

impl Report {
    pub fn new(kind: &'static str, inputs: &[&[u8]]) -> Self {
        let mut hasher = Sha256::new();
        for input in inputs {
            hasher.update((input.len() as u64).to_le_bytes());
            hasher.update(input);
        }
        let inputs_sha256 = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Report {
            kind,
            version: VERSION,
            status: Status::Pass,
            seed: None,
            inputs_sha256,
            lines: Vec::new(),
            checks: Vec::new(),
            error: None,
            body: Map::new(),
        }
    }

    pub fn escalate(&mut self, status: Status) {
        self.status = self.status.max(status);
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn check(&mut self, check: Check) {
        if !check.pass {
            self.escalate(Status::CheckFailure);
        }
        self.lines.push(check.line());
        self.checks.push(check);
    }

    pub fn fail(&mut self, e: &Error) {
        self.escalate(Status::of_error(e));
        self.lines.push(format!("error: {e}"));
        self.error = Some(e.to_string());
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.body.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.body.get(key)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `element,ratio` rows from the `per_element_ratios` field, if present.
    pub fn ratios_csv(&self) -> Option<String> {
        let ratios = self.body.get("per_element_ratios")?.as_array()?;
        let mut out = String::from("element,ratio\n");
        for (i, r) in ratios.iter().enumerate() {
            let cell = match r {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{i},{cell}\n"));
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashes_are_deterministic_and_input_sensitive() {
        let a = Report::new("alpha", &[b"x", b"y"]);
        let b = Report::new("alpha", &[b"x", b"y"]);
        let c = Report::new("alpha", &[b"xy"]);
        assert_eq!(a.inputs_sha256, b.inputs_sha256);
        assert_ne!(a.inputs_sha256, c.inputs_sha256);
        assert_eq!(a.inputs_sha256.len(), 64);
    }

    #[test]
    fn status_only_escalates() {
        let mut r = Report::new("examples", &[]);
        r.check(Check::new("one", false, ""));
        r.check(Check::new("two", true, ""));
        assert_eq!(r.status, Status::CheckFailure);
        r.fail(&Error::CapExceeded("lp".into()));
        assert_eq!(r.status.exit_code(), 3);
        r.escalate(Status::Pass);
        assert_eq!(r.status, Status::ResourceCap);
    }

    #[test]
    fn report_json_is_flat_with_kind() {
        let mut r = Report::new("alpha", &[]);
        r.set("alpha_star", "3/2");
        r.set("per_element_ratios", vec![Some("2"), None]);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["kind"], "alpha");
        assert_eq!(v["alpha_star"], "3/2");
        assert_eq!(r.ratios_csv().unwrap(), "element,ratio\n0,2\n1,\n");
    }
}
