//! Check records, suite reports and versioned baseline constants.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::io::write_atomic;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const BASELINE_SCHEMA_VERSION: u32 = 1;

/// Allowed regression of an empirical ratio over its baseline constant.
pub const REGRESSION_TOLERANCE: f64 = 0.10;
/// Allowed relative disagreement between two grid resolutions.
pub const RESOLUTION_TOLERANCE: f64 = 0.20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotDecided,
}

/// One named check with its two sides, ratio and verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub parameters: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_constant: Option<f64>,
    #[serde(rename = "baselineC", skip_serializing_if = "Option::is_none")]
    pub baseline_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_s: Option<f64>,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>) -> Self {
        CheckRecord {
            check: check.into(),
            parameters: BTreeMap::new(),
            lhs: 0.0,
            rhs: 0.0,
            ratio: 1.0,
            empirical_constant: None,
            baseline_c: None,
            tolerance: None,
            verdict: Verdict::NotDecided,
            pass: false,
            notes: Vec::new(),
            runtime_s: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_string(), sanitize(v));
        self
    }

    /// Sets both sides; the ratio of `0/0` is taken as 1.
    pub fn sides(mut self, lhs: f64, rhs: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.ratio = ratio(lhs, rhs);
        self
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.ratio = ratio;
        self
    }

    pub fn constant(mut self, c: f64) -> Self {
        self.empirical_constant = Some(c);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        self.pass = verdict == Verdict::Pass;
        self
    }

    pub fn passed_if(self, ok: bool) -> Self {
        self.verdict(if ok { Verdict::Pass } else { Verdict::Fail })
    }

    /// Also requires the empirical constant (or the ratio) to be at most
    /// `C (1 + tol)`. An earlier failure is kept.
    pub fn against_baseline(mut self, baseline: Option<f64>, tol: f64) -> Self {
        let value = self.empirical_constant.unwrap_or(self.ratio);
        self.tolerance = Some(tol);
        let failed = self.verdict == Verdict::Fail;
        match baseline {
            Some(c) => {
                self.baseline_c = Some(c);
                let ok = value.is_finite() && value <= c * (1.0 + tol);
                self.verdict(if ok && !failed {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                })
            }
            None if failed => self,
            None => self
                .note("no baseline constant recorded for this check")
                .verdict(Verdict::NotDecided),
        }
    }

    /// `value / baseline`, when a baseline is attached.
    pub fn margin(&self) -> Option<f64> {
        self.baseline_c
            .map(|c| self.empirical_constant.unwrap_or(self.ratio) / c)
    }

    /// Replaces non-finite numbers so the record serializes, failing the check.
    pub fn finalized(mut self) -> Self {
        let mut bad = false;
        for v in [&mut self.lhs, &mut self.rhs, &mut self.ratio] {
            if !v.is_finite() {
                bad = true;
                *v = clamp(*v);
            }
        }
        for v in [
            &mut self.empirical_constant,
            &mut self.baseline_c,
            &mut self.tolerance,
        ]
        .into_iter()
        .flatten()
        {
            if !v.is_finite() {
                bad = true;
                *v = clamp(*v);
            }
        }
        if bad {
            self = self
                .note("non-finite value replaced by the largest finite float")
                .verdict(Verdict::Fail);
        }
        self
    }
}

fn clamp(v: f64) -> f64 {
    if v.is_nan() {
        f64::MAX
    } else {
        v.signum() * f64::MAX
    }
}

fn sanitize(v: Value) -> Value {
    match v {
        Value::Array(items) => Value::Array(items.into_iter().map(sanitize).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, sanitize(v))).collect())
        }
        // serde_json turns non-finite floats into null; spell them out instead.
        Value::Null => Value::String("inf-or-nan".into()),
        other => other,
    }
}

/// `lhs / rhs`, with `0 / 0 = 1`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        1.0
    } else {
        lhs / rhs
    }
}

/// Relative gap `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub not_decided: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub config: Value,
    pub checks: Vec<CheckRecord>,
    pub summary: Tally,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_s: Option<f64>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, config: Value, checks: Vec<CheckRecord>) -> Self {
        let checks: Vec<CheckRecord> = checks.into_iter().map(CheckRecord::finalized).collect();
        let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
        let summary = Tally {
            total: checks.len(),
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            not_decided: count(Verdict::NotDecided),
        };
        VerificationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            suite: suite.into(),
            config,
            checks,
            summary,
            runtime_s: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn merge(suite: impl Into<String>, config: Value, parts: Vec<VerificationReport>) -> Self {
        let checks = parts.into_iter().flat_map(|r| r.checks).collect();
        VerificationReport::new(suite, config, checks)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub grid: String,
    pub date: String,
    pub generator: String,
}

/// Pilot constants for inequalities that hold only up to an unspecified factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub constants: BTreeMap<String, f64>,
}

const BUNDLED: &str = include_str!("../baselines/default.toml");

impl Baseline {
    pub fn new(provenance: Provenance) -> Self {
        Baseline {
            schema_version: BASELINE_SCHEMA_VERSION,
            provenance,
            constants: BTreeMap::new(),
        }
    }

    /// The constants shipped with the crate.
    pub fn bundled() -> Self {
        Baseline::parse(BUNDLED).expect("bundled baseline parses")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let b: Baseline = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if b.schema_version != BASELINE_SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "baseline schema_version {} is not {}",
                b.schema_version, BASELINE_SCHEMA_VERSION
            )));
        }
        Ok(b)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Baseline::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("baseline serializes")
    }

    /// Writes the file; refuses to replace an existing one unless `force`.
    pub fn save(&self, path: &Path, force: bool) -> Result<()> {
        if path.exists() && !force {
            return Err(Error::BaselineExists(path.display().to_string()));
        }
        write_atomic(path, self.to_toml().as_bytes())
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.constants.get(id).copied()
    }

    pub fn insert(&mut self, id: impl Into<String>, value: f64) {
        self.constants.insert(id.into(), value);
    }
}
