//! The "report/1" JSON schema. Text output is rendered from these values.

use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs;
use std::path::Path;

pub const SCHEMA: &str = "report/1";

/// Keys whose values depend on the clock; removed before comparing runs.
pub const TIMING_KEYS: &[&str] = &["created", "millis"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Indeterminate => "INDETERMINATE",
        }
    }

    /// FAIL dominates INDETERMINATE, which dominates PASS.
    pub fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
        let mut out = Status::Pass;
        for s in statuses {
            out = match (out, s) {
                (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
                (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
                _ => Status::Pass,
            };
        }
        out
    }
}

/// Where an expected value comes from: the published statement, an immediate fact, or
/// a value this tool computes and checks against an independent route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Cited,
    Trivial,
    Computed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub basis: Basis,
    pub expected: String,
    pub observed: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Pointer to a certificate file written next to the report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRef {
    pub file: String,
    pub curve_label: Option<String>,
    pub poly_sha256: String,
    pub degree: usize,
    pub field: String,
    pub witnesses: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub id: String,
    pub title: String,
    pub tier: String,
    pub verdict: Status,
    pub checks: Vec<Check>,
    pub certificates: Vec<CertificateRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<Value>,
    pub millis: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tier: String,
    pub seed: u64,
    pub tables_sha256: String,
    pub curves: usize,
    pub created: String,
    pub millis: u64,
    pub summary: Summary,
    pub lemmas: Vec<LemmaReport>,
}

impl Report {
    pub fn summarise(lemmas: &[LemmaReport]) -> Summary {
        let mut s = Summary::default();
        for l in lemmas {
            match l.verdict {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Indeterminate => s.indeterminate += 1,
            }
        }
        s
    }

    /// 0 when everything passed, 1 with any FAIL, 2 with INDETERMINATE but no FAIL.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else if self.summary.indeterminate > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lemmas {
            out.push_str(&format!("{:<13} {} ({} ms)\n", l.verdict.as_str(), l.id, l.millis));
            for c in l.checks.iter().filter(|c| c.status != Status::Pass) {
                out.push_str(&format!("    {} {}: expected {}, observed {}\n", c.status.as_str(), c.name, c.expected, c.observed));
            }
        }
        out.push_str(&format!(
            "{} lemmas: {} pass, {} fail, {} indeterminate ({} ms)\n",
            self.lemmas.len(),
            self.summary.pass,
            self.summary.fail,
            self.summary.indeterminate,
            self.millis
        ));
        out
    }
}

/// Drops every clock-dependent key, recursively.
pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for k in TIMING_KEYS {
                m.remove(*k);
            }
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

/// Writes through a temporary file so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
