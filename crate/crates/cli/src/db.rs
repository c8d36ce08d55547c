//! Curve records: the shipped fixtures plus anything ingested into the local store.

use anyhow::{bail, Context, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use ttower_core::elliptic::{Curve, CurveRecord};

const CURATED_CURVES: &str = include_str!("../fixtures/curated_curves.jsonl");
const LMFDB_EXPORT: &str = include_str!("../fixtures/lmfdb_export.jsonl");
const MAZUR_SAMPLE: &str = include_str!("../fixtures/mazur_sample.jsonl");

/// Default location of the ingest store, relative to the working directory.
pub const DEFAULT_STORE: &str = ".ttower/curves.jsonl";

/// Labels a lemma needs but the database lacks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingCurves(pub Vec<String>);

impl fmt::Display for MissingCurves {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "missing curve records: {}", self.0.join(", "))
    }
}

impl std::error::Error for MissingCurves {}

#[derive(Clone, Debug, Default)]
pub struct CurveDb {
    records: BTreeMap<String, CurveRecord>,
}

pub fn parse_jsonl(text: &str) -> Result<Vec<CurveRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let r: CurveRecord = serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
        r.to_curve().with_context(|| format!("line {}", i + 1))?;
        out.push(r);
    }
    Ok(out)
}

fn same_curve(a: &CurveRecord, b: &CurveRecord) -> bool {
    match (a.to_curve(), b.to_curve()) {
        (Ok(x), Ok(y)) => x.ainvs() == y.ainvs(),
        _ => false,
    }
}

impl CurveDb {
    pub fn empty() -> CurveDb {
        CurveDb::default()
    }

    /// The shipped fixtures only.
    pub fn builtin() -> CurveDb {
        let mut db = CurveDb::default();
        for text in [CURATED_CURVES, LMFDB_EXPORT, MAZUR_SAMPLE] {
            for r in parse_jsonl(text).expect("shipped fixtures parse") {
                db.insert(r).expect("shipped fixtures are consistent");
            }
        }
        db
    }

    /// Fixtures plus the ingest store, if it exists.
    pub fn open(store: &Path) -> Result<CurveDb> {
        let mut db = CurveDb::builtin();
        if store.exists() {
            let text = fs::read_to_string(store).with_context(|| format!("reading {}", store.display()))?;
            for r in parse_jsonl(&text).with_context(|| format!("in {}", store.display()))? {
                db.insert(r)?;
            }
        }
        Ok(db)
    }

    /// Adds a record. Returns false if an identical record is already present; a label
    /// with different a-invariants is an error.
    pub fn insert(&mut self, r: CurveRecord) -> Result<bool> {
        if let Some(old) = self.records.get(&r.label) {
            if same_curve(old, &r) {
                return Ok(false);
            }
            bail!("label {} already present with different a-invariants", r.label);
        }
        self.records.insert(r.label.clone(), r);
        Ok(true)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }

    pub fn records(&self) -> impl Iterator<Item = &CurveRecord> {
        self.records.values()
    }

    pub fn record(&self, label: &str) -> Option<&CurveRecord> {
        self.records.get(label)
    }

    pub fn curve(&self, label: &str) -> Option<Curve> {
        self.records.get(label).and_then(|r| r.to_curve().ok())
    }

    /// All requested curves, or the full list of absent labels.
    pub fn require(&self, labels: &[&str]) -> std::result::Result<Vec<Curve>, MissingCurves> {
        let missing: Vec<String> =
            labels.iter().filter(|l| self.curve(l).is_none()).map(|l| l.to_string()).collect();
        if !missing.is_empty() {
            return Err(MissingCurves(missing));
        }
        Ok(labels.iter().map(|l| self.curve(l).unwrap()).collect())
    }
}

/// Validates a JSON-lines file and appends its new records to the store. Returns
/// (added, already present).
pub fn ingest(file: &Path, store: &Path) -> Result<(usize, usize)> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let incoming = parse_jsonl(&text)?;
    let mut db = CurveDb::open(store)?;
    let mut fresh = Vec::new();
    let mut known = 0;
    for r in incoming {
        if db.insert(r.clone())? {
            fresh.push(r);
        } else {
            known += 1;
        }
    }
    if !fresh.is_empty() {
        if let Some(dir) = store.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut f = fs::OpenOptions::new().create(true).append(true).open(store)?;
        for r in &fresh {
            writeln!(f, "{}", serde_json::to_string(r)?)?;
        }
    }
    Ok((fresh.len(), known))
}

pub fn store_path(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os("TTOWER_DB").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_STORE))
}
