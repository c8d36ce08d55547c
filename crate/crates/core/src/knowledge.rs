//! Classification tables and degree filters, loaded from a checksummed fixture.

use crate::arith::parse_rational;
use crate::arith::primes::{divisors, euler_phi, is_prime, jacobi, valuation};
use crate::error::{Error, Result};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};

pub const TABLES_SCHEMA: &str = "tables/1";

const DEFAULT_TABLES: &str = include_str!("../fixtures/tables.json");

/// A degree given as num(p)/den with num listed by increasing powers of p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeFormula {
    pub text: String,
    pub num: Vec<i64>,
    pub den: i64,
}

impl DegreeFormula {
    pub fn eval(&self, p: u64) -> Option<u64> {
        let p = p as i128;
        let v: i128 = self.num.iter().rev().fold(0, |acc, &c| acc * p + c as i128);
        let d = self.den as i128;
        (d != 0 && v % d == 0 && v / d > 0).then(|| (v / d) as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Applies {
    All,
    In { primes: Vec<u64> },
    Mod { m: u64, residues: Vec<u64> },
    /// p = 1 mod 3, or (-D/p) = 1 for some listed D.
    Mod3OrKronecker { ds: Vec<i64> },
}

impl Applies {
    pub fn holds(&self, p: u64) -> bool {
        match self {
            Applies::All => true,
            Applies::In { primes } => primes.contains(&p),
            Applies::Mod { m, residues } => residues.contains(&(p % m)),
            Applies::Mod3OrKronecker { ds } => p % 3 == 1 || ds.iter().any(|&d| p > 2 && jacobi(-d, p) == 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Occurs,
    /// Listed only as possibly occurring; nothing may rely on its absence.
    Maybe,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParametricRow {
    pub when: Applies,
    pub degrees: Vec<DegreeFormula>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledJ {
    pub j: String,
    pub label: String,
}

impl LabelledJ {
    pub fn value(&self) -> Result<BigRational> {
        parse_rational(&self.j).ok_or_else(|| Error::InvalidInput(format!("bad j-invariant {}", self.j)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeTables {
    pub mazur_isogeny_degrees: BTreeSet<u64>,
    pub admissible_prime_power_orders: BTreeSet<u64>,
    pub degree_table: BTreeMap<u64, BTreeSet<u64>>,
    pub degree_table_parametric: Vec<ParametricRow>,
    pub phi_table: BTreeMap<u64, u64>,
    pub cm_isogeny_rows: BTreeMap<u64, Vec<LabelledJ>>,
    pub cm_thirteen_j: Vec<String>,
    pub abelian_full_torsion: BTreeMap<u64, Vec<String>>,
    pub cyclotomic_full_torsion: BTreeSet<u64>,
    pub seventeen_isogeny_j: Vec<LabelledJ>,
}

/// Degrees [Q(P):Q] for a point P of order p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeOptions {
    /// The full list, for the tabulated primes.
    Exact(BTreeSet<u64>),
    /// Degrees known to occur, plus degrees that might; not exhaustive.
    Parametric { occurs: BTreeSet<u64>, maybe: BTreeSet<u64>, rows: Vec<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepContext {
    /// [Q(P):Q(pP)] in general.
    Generic,
    /// Q(P)/Q(pP) Galois over an abelian base.
    GaloisOverBase,
    /// p = 2.
    PEqualsTwo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FullTorsionContext {
    /// Q(E[n])/Q abelian.
    Abelian,
    /// Q(E[n]) inside a cyclotomic field Q(zeta_{p^inf}), p odd.
    Cyclotomic,
    /// Inside a totally real field such as K.
    TotallyReal,
}

/// sha256 of the canonical (sorted-key, compact) JSON of a value.
pub fn canonical_sha256(v: &Value) -> String {
    let s = serde_json::to_string(v).expect("json value serializes");
    hex::encode(Sha256::digest(s.as_bytes()))
}

impl KnowledgeTables {
    /// Parses a fixture and checks its schema and checksum.
    pub fn from_json(s: &str) -> Result<KnowledgeTables> {
        let doc: Value = serde_json::from_str(s)?;
        if doc.get("schema").and_then(Value::as_str) != Some(TABLES_SCHEMA) {
            return Err(Error::InvalidInput("tables: unknown schema".into()));
        }
        let content = doc.get("content").ok_or_else(|| Error::InvalidInput("tables: no content".into()))?;
        let want = doc.get("sha256").and_then(Value::as_str).unwrap_or_default();
        let got = canonical_sha256(content);
        if want != got {
            return Err(Error::InvalidInput(format!("tables: checksum mismatch ({got})")));
        }
        let t: KnowledgeTables = serde_json::from_value(content.clone())?;
        t.check()?;
        Ok(t)
    }

    /// The reviewed tables shipped with the crate.
    pub fn builtin() -> KnowledgeTables {
        KnowledgeTables::from_json(DEFAULT_TABLES).expect("builtin tables are valid")
    }

    pub fn builtin_sha256() -> String {
        let doc: Value = serde_json::from_str(DEFAULT_TABLES).expect("builtin tables parse");
        canonical_sha256(&doc["content"])
    }

    fn check(&self) -> Result<()> {
        for (&n, &v) in &self.phi_table {
            if euler_phi(n) != v {
                return Err(Error::InvalidInput(format!("tables: phi({n}) recorded as {v}")));
            }
        }
        if self.cm_thirteen_j.len() != 13 || self.seventeen_isogeny_j.len() != 2 {
            return Err(Error::InvalidInput("tables: wrong number of j-invariants".into()));
        }
        Ok(())
    }

    pub fn isogeny_degree_allowed(&self, n: u64) -> bool {
        self.mazur_isogeny_degrees.contains(&n)
    }

    pub fn admissible_prime_power_order(&self, m: u64) -> bool {
        self.admissible_prime_power_orders.contains(&m)
    }

    pub fn point_degree_options(&self, p: u64) -> Result<DegreeOptions> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if let Some(s) = self.degree_table.get(&p) {
            return Ok(DegreeOptions::Exact(s.clone()));
        }
        let mut occurs = BTreeSet::new();
        let mut maybe = BTreeSet::new();
        let mut rows = Vec::new();
        for row in self.degree_table_parametric.iter().filter(|r| r.when.holds(p)) {
            let target = if row.status == RowStatus::Occurs { &mut occurs } else { &mut maybe };
            for f in &row.degrees {
                if let Some(d) = f.eval(p) {
                    target.insert(d);
                }
                rows.push(f.text.clone());
            }
        }
        Ok(DegreeOptions::Parametric { occurs, maybe, rows })
    }

    pub fn phi(&self, n: u64) -> Option<u64> {
        self.phi_table.get(&n).copied()
    }

    pub fn full_torsion_allowed(&self, n: u64, ctx: FullTorsionContext) -> bool {
        match ctx {
            FullTorsionContext::Abelian => self.abelian_full_torsion.contains_key(&n),
            FullTorsionContext::Cyclotomic => self.cyclotomic_full_torsion.contains(&n),
            // The Weil pairing puts zeta_n in the field; a real field only has zeta_2.
            FullTorsionContext::TotallyReal => n <= 2,
        }
    }

    /// The j-invariants of the CM list, exactly.
    pub fn cm_j_values(&self) -> Result<Vec<BigRational>> {
        self.cm_thirteen_j
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| Error::InvalidInput(format!("bad j {s}"))))
            .collect()
    }
}

/// Q(P) lies in the layer Q_{m,p} with m = v_p(phi(n)).
pub fn layer_bound(n: u64, p: u64) -> u32 {
    valuation(euler_phi(n), p)
}

/// Allowed values of [Q(P):Q(pP)].
pub fn degree_step_bound(p: u64, ctx: StepContext) -> Result<BTreeSet<u64>> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    Ok(match ctx {
        StepContext::Generic => divisors(p * p).into_iter().chain(divisors((p - 1) * p)).collect(),
        StepContext::GaloisOverBase => divisors(p * p).into_iter().collect(),
        StepContext::PEqualsTwo => {
            if p != 2 {
                return Err(Error::InvalidInput("context requires p = 2".into()));
            }
            divisors(4).into_iter().collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads_and_tamper_fails() {
        let t = KnowledgeTables::builtin();
        assert!(t.isogeny_degree_allowed(21) && !t.isogeny_degree_allowed(23) && t.isogeny_degree_allowed(1));
        let tampered = DEFAULT_TABLES.replacen("\"163\": 162", "\"163\": 160", 1);
        assert_ne!(tampered, DEFAULT_TABLES);
        assert!(KnowledgeTables::from_json(&tampered).is_err());
    }

    #[test]
    fn formulas() {
        let f = DegreeFormula { text: "(p-1)^2/3".into(), num: vec![1, -2, 1], den: 3 };
        assert_eq!(f.eval(7), Some(12));
        assert_eq!(f.eval(5), None);
    }

    #[test]
    fn step_bounds() {
        assert_eq!(degree_step_bound(3, StepContext::GaloisOverBase).unwrap(), [1, 3, 9].into());
        assert_eq!(degree_step_bound(2, StepContext::PEqualsTwo).unwrap(), [1, 2, 4].into());
        assert_eq!(degree_step_bound(5, StepContext::Generic).unwrap(), [1, 2, 4, 5, 10, 20, 25].into());
    }
}
