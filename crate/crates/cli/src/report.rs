//! The JSON report layout. See the README for the field reference.

use std::collections::BTreeMap;

use qonline::game::{AdviceTranscript, AlgorithmKind, CompetitiveReport, Resources};
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// A number written with at most 12 significant digits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Num(pub f64);

impl Num {
    pub fn rounded(self) -> f64 {
        if !self.0.is_finite() || self.0 == 0.0 {
            return self.0;
        }
        format!("{:.11e}", self.0).parse().unwrap_or(self.0)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.rounded())
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

/// SHA-256 of an instance's canonical text, hex encoded.
pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeRecord {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Tolerance the acceptance predicate uses.
    pub tolerance: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgorithmRecord {
    pub name: String,
    pub kind: AlgorithmKind,
    pub resources: Resources,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceRecord {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub digest: String,
    pub expected_cost: Num,
    pub opt_cost: Num,
    pub ratio: Num,
    pub branch_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advice: Option<AdviceTranscript>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    /// Maximum per-instance ratio.
    pub strict_ratio: Num,
    pub witness: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_ratio: Option<Num>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub scenario: String,
    pub formula: &'static str,
    pub params: BTreeMap<String, String>,
    pub mode: ModeRecord,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub algorithms: Vec<AlgorithmRecord>,
    pub instances: Vec<InstanceRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate: Option<Aggregate>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        self.passed = self.checks.iter().all(|c| c.passed);
    }

    pub fn set_aggregate(&mut self, report: &CompetitiveReport, expected_ratio: Option<f64>) {
        self.aggregate = Some(Aggregate {
            strict_ratio: Num(report.strict_ratio),
            witness: report.witness,
            expected_ratio: expected_ratio.map(Num),
        });
    }

    pub fn stamp(&mut self) {
        self.generated_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(Num(2.0).rounded(), 2.0);
        assert_eq!(Num(1.0 / 3.0).rounded().to_string(), "0.333333333333");
        assert_eq!(Num(2.4375000000000004).rounded(), 2.4375);
        assert_eq!(serde_json::to_string(&Num(0.1 + 0.2)).unwrap(), "0.3");
    }

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(
            digest(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
