//! Torsion of an elliptic curve over a finite abelian field and over the infinite towers.
//!
//! Over a finite field F the order of E(F)_tors divides B = gcd #E(F_q) over completely
//! split primes q of good reduction (reduction is injective on torsion there). For each
//! prime l dividing B the l-primary part is computed exactly, level by level, stopping when
//! a level adds nothing or the count reaches the l-part of B.
//!
//! A tower is reduced to finite search fields. For K, K5 and the Z_p-extensions the
//! l-primary torsion lies in the unique subfield whose degree is the tower part of
//! phi(l^k) (the Galois action on a cyclic group of order l^k factors through its
//! automorphisms), times 3 for l = 2 to allow the cubic field of E[2]. For Q(zeta_{p^inf})
//! the search field is the level where the torsion is known to stabilise.

use super::abelian::{exact_order_points, AbelianField, ExactOrderCount, FieldPoint, YStatus};
use super::certificate::{certify_no_root, CertifyConfig, CertifyOutcome, NoRootCertificate, PolyRecipe};
use super::fieldspec::{FieldSpec, Tower};
use super::split::find_split_primes;
use crate::arith::primes::{euler_phi, factorize, gcd_u64, prime_divisors, valuation};
use crate::arith::FactorConfig;
use crate::elliptic::curve::Curve;
use crate::elliptic::point::count_points;
use crate::elliptic::torsion::{normalise, torsion_over_q, TorsionGroup};
use crate::error::{Error, Result};
use crate::knowledge::KnowledgeTables;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug)]
pub struct TorsionConfig {
    pub factor: FactorConfig,
    pub certify: CertifyConfig,
    /// Norm-degree budget for exact root finding.
    pub budget: usize,
    /// Split primes used for the order bound.
    pub bound_primes: usize,
    /// Attach certificates to negative resolutions.
    pub certificates: bool,
}

impl Default for TorsionConfig {
    fn default() -> Self {
        TorsionConfig {
            factor: FactorConfig::default(),
            certify: CertifyConfig { max_candidates: 12, ..CertifyConfig::default() },
            budget: super::abelian::DEFAULT_DEGREE_BUDGET,
            bound_primes: 16,
            certificates: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Witness,
    CertifiedAbsent,
    Indeterminate,
}

/// Exact data of a witness point: x has the given minimal polynomial over Q (short
/// model coordinates) and lives with y in Q(zeta_conductor)^H.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x_minpoly: String,
    pub conductor: u64,
    pub field_degree: usize,
    pub y_zero: bool,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Artifact {
    Point(PointRecord),
    Certificate { certificate: Box<NoRootCertificate> },
    /// The reduction bound leaves no room for a point of this order.
    ReductionBound { bound: u64, primes: Vec<u64> },
    /// Exact search of the primitive division polynomial over the field found no point;
    /// `obstructed` counts x-orbits in F whose y is not.
    ExactSearch { obstructed: usize },
    /// No point of this smaller order, hence none of the larger one.
    ImpliedBy { order: u64 },
    Note { text: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderEvidence {
    pub order: u64,
    pub field: FieldSpec,
    pub verdict: Verdict,
    pub points: u64,
    pub artifacts: Vec<Artifact>,
}

/// The l-primary part over one finite field, with its evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeResolution {
    pub l: u64,
    pub field: FieldSpec,
    pub bound: u64,
    pub bound_primes: Vec<u64>,
    /// counts[j] = #E(F)[l^j].
    pub counts: Vec<u64>,
    pub group: TorsionGroup,
    pub evidence: Vec<OrderEvidence>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerTorsion {
    pub curve: Option<String>,
    pub field: FieldSpec,
    pub over_q: TorsionGroup,
    pub group: TorsionGroup,
    pub primes: Vec<PrimeResolution>,
}

impl TowerTorsion {
    pub fn evidence(&self) -> impl Iterator<Item = &OrderEvidence> {
        self.primes.iter().flat_map(|p| p.evidence.iter())
    }

    /// Every order dividing the group exponent has a witness and every larger
    /// prime power has a negative resolution.
    pub fn consistent(&self) -> bool {
        self.evidence().all(|ev| {
            let claimed = self.group.n.is_multiple_of(ev.order);
            match ev.verdict {
                Verdict::Witness => claimed,
                Verdict::CertifiedAbsent => !claimed,
                Verdict::Indeterminate => false,
            }
        })
    }
}

/// Split primes and the gcd of the point counts over them.
pub fn reduction_bound(e: &Curve, f: &FieldSpec, count: usize) -> Result<(u64, Vec<u64>)> {
    let mut excluded: BTreeSet<u64> = [2, 3].into();
    excluded.extend(e.bad_primes().ok_or_else(|| Error::Unsupported("cannot factor the discriminant".into()))?);
    let qs = find_split_primes(f, count, &excluded)?;
    let mut g = 0u64;
    for &q in &qs {
        g = gcd_u64(g, count_points(e, q)?);
    }
    Ok((g, qs))
}

fn point_record(p: &FieldPoint, e: &Curve) -> PointRecord {
    let (conductor, field_degree) = match &p.y {
        YStatus::InField { field, .. } => (field.conductor, field.degree()),
        _ => (p.x_field.conductor, p.x_field.degree()),
    };
    PointRecord {
        x_minpoly: p.x_minpoly.to_string(),
        conductor,
        field_degree,
        y_zero: matches!(p.y, YStatus::Zero),
        verified: p.verify_order(e),
    }
}

fn try_certificate(e: &Curve, order: u64, l: u64, k: u32, f: &FieldSpec, cfg: &TorsionConfig) -> Option<Artifact> {
    if !cfg.certificates {
        return None;
    }
    let recipe = if k == 1 {
        PolyRecipe::division(e, l as usize)
    } else {
        PolyRecipe::primitive_division(e, order as usize).ok()?
    };
    match certify_no_root(&recipe, e.label.as_deref(), f, &BTreeSet::new(), &cfg.certify) {
        Ok(CertifyOutcome::Certified(c)) => Some(Artifact::Certificate { certificate: Box::new(c) }),
        _ => None,
    }
}

/// The l-primary torsion of E over the finite field f. `orders` lists the prime powers
/// of l that need evidence.
pub fn resolve_prime(
    e: &Curve,
    l: u64,
    f: &FieldSpec,
    orders: &[u64],
    cfg: &TorsionConfig,
) -> Result<PrimeResolution> {
    let (bound, bound_primes) = reduction_bound(e, f, cfg.bound_primes)?;
    let cap = l.pow(valuation(bound, l));
    let mut counts = vec![1u64];
    let mut levels: Vec<ExactOrderCount> = Vec::new();
    if cap > 1 {
        let af = AbelianField::new(f)?;
        let mut k = 1;
        loop {
            let c = exact_order_points(e, l, k, &af, &cfg.factor, cfg.budget)?;
            let total = counts[k as usize - 1] + c.points as u64;
            levels.push(c);
            if total == counts[k as usize - 1] {
                break;
            }
            counts.push(total);
            if total >= cap {
                break;
            }
            k += 1;
        }
    }
    let group = TorsionGroup::from_counts(l, &counts);
    let exponent = group.n;
    let top = counts.len() as u32 - 1;
    let mut evidence = Vec::new();
    let mut first_absent: Option<u64> = None;
    let mut wanted: BTreeSet<u64> = orders.iter().copied().collect();
    wanted.insert(exponent * l);
    for order in wanted.into_iter().filter(|&m| m > 1) {
        let k = valuation(order, l);
        if order <= exponent {
            let lev = &levels[k as usize - 1];
            let artifacts = lev.witnesses.iter().take(1).map(|p| Artifact::Point(point_record(p, e))).collect();
            evidence.push(OrderEvidence {
                order,
                field: f.clone(),
                verdict: Verdict::Witness,
                points: lev.points as u64,
                artifacts,
            });
            continue;
        }
        let mut artifacts = Vec::new();
        if let Some(m) = first_absent {
            artifacts.push(Artifact::ImpliedBy { order: m });
        } else {
            first_absent = Some(order);
            if let Some(c) = try_certificate(e, order, l, k, f, cfg) {
                artifacts.push(c);
            }
            if bound % order != 0 || *counts.last().unwrap() >= cap {
                artifacts.push(Artifact::ReductionBound { bound, primes: bound_primes.clone() });
            }
            if let Some(lev) = levels.get(k as usize - 1).filter(|_| k <= top + 1) {
                artifacts.push(Artifact::ExactSearch { obstructed: lev.obstructed.len() });
            }
        }
        let verdict = if artifacts.is_empty() { Verdict::Indeterminate } else { Verdict::CertifiedAbsent };
        evidence.push(OrderEvidence { order, field: f.clone(), verdict, points: 0, artifacts });
    }
    if evidence.iter().any(|ev| ev.verdict == Verdict::Indeterminate) {
        return Err(Error::Indeterminate(format!("{l}-primary torsion over {f} unresolved")));
    }
    Ok(PrimeResolution { l, field: f.clone(), bound, bound_primes, counts, group, evidence })
}

/// Torsion over a finite abelian field: every prime dividing the reduction bound is
/// resolved, and admissible prime powers get evidence.
pub fn torsion_over_field(e: &Curve, f: &FieldSpec, tables: &KnowledgeTables, cfg: &TorsionConfig) -> Result<TowerTorsion> {
    if !f.is_finite() {
        return Err(Error::InvalidInput("torsion_over_field expects a finite field".into()));
    }
    let over_q = torsion_over_q(e)?.group;
    let (bound, _) = reduction_bound(e, f, cfg.bound_primes)?;
    let by_prime = admissible_by_prime(tables);
    let mut ls: BTreeSet<u64> = prime_divisors(bound).into_iter().collect();
    ls.extend(by_prime.keys());
    let mut primes = Vec::new();
    let mut group = TorsionGroup::trivial();
    for l in ls {
        let orders = by_prime.get(&l).cloned().unwrap_or_default();
        let r = resolve_prime(e, l, f, &orders, cfg)?;
        group = group.combine(&r.group);
        primes.push(r);
    }
    let group = normalise(group);
    check_contains(&group, &over_q)?;
    Ok(TowerTorsion { curve: e.label.clone(), field: f.clone(), over_q, group, primes })
}

fn admissible_by_prime(tables: &KnowledgeTables) -> BTreeMap<u64, Vec<u64>> {
    let mut m: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &o in &tables.admissible_prime_power_orders {
        let f = factorize(o);
        if let [(l, _)] = f.as_slice() {
            m.entry(*l).or_default().push(o);
        }
    }
    m
}

fn check_contains(big: &TorsionGroup, small: &TorsionGroup) -> Result<()> {
    if !big.n.is_multiple_of(small.n) || !big.m.is_multiple_of(small.m) {
        return Err(Error::Indeterminate(format!("computed group {big} does not contain {small}")));
    }
    Ok(())
}

/// Level of Q(zeta_{p^k}) at which the torsion over Q(zeta_{p^inf}) is attained.
pub fn cyclotomic_stable_level(p: u64) -> u32 {
    match p {
        2 => 4,
        3 => 3,
        _ => 1,
    }
}

/// Degree of the finite subfield of the tower holding the l-primary torsion, when
/// the l-part of the torsion order is at most l^v.
fn search_degree(t: Tower, l: u64, v: u32) -> u64 {
    let mut d = euler_phi(l.pow(v.max(1)));
    if l == 2 {
        d *= 3;
    }
    let keep = |q: u64| match t {
        Tower::K => true,
        Tower::K5 => q >= 5,
        Tower::Zp(p) => q == p,
        Tower::Cyclo(_) => true,
    };
    factorize(d).into_iter().filter(|&(q, _)| keep(q)).map(|(q, e)| q.pow(e)).product()
}

/// Finite search field for l-primary torsion over a tower.
pub fn search_field(t: Tower, l: u64, tables: &KnowledgeTables) -> Result<FieldSpec> {
    if let Tower::Cyclo(p) = t {
        return Ok(FieldSpec::Cyclo { p, k: cyclotomic_stable_level(p) }.normalize());
    }
    let kmax = admissible_by_prime(tables).get(&l).map_or(1, |v| v.iter().map(|&o| valuation(o, l)).max().unwrap());
    let d = search_degree(t, l, kmax);
    FieldSpec::Tower(t)
        .unique_subfield(d)?
        .ok_or_else(|| Error::InvalidInput(format!("no subfield of degree {d} in {t:?}")))
}

/// Torsion over one of the towers K, K5, Q_{inf,p}, Q(zeta_{p^inf}).
pub fn torsion_over_tower(e: &Curve, t: Tower, tables: &KnowledgeTables, cfg: &TorsionConfig) -> Result<TowerTorsion> {
    if let Tower::Cyclo(_) = t {
        let f = search_field(t, 2, tables)?;
        let mut r = torsion_over_field(e, &f, tables, cfg)?;
        r.field = FieldSpec::Tower(t);
        return Ok(r);
    }
    let over_q = torsion_over_q(e)?.group;
    let mut primes = Vec::new();
    let mut group = TorsionGroup::trivial();
    for (l, orders) in admissible_by_prime(tables) {
        let wide = search_field(t, l, tables)?;
        let (bound, _) = reduction_bound(e, &wide, cfg.bound_primes)?;
        // A smaller l-part of the bound allows a smaller search field.
        let v = valuation(bound, l);
        let d = search_degree(t, l, v.min(orders.iter().map(|&o| valuation(o, l)).max().unwrap_or(1)));
        let f = FieldSpec::Tower(t).unique_subfield(d)?.unwrap_or(wide);
        let r = resolve_prime(e, l, &f, &orders, cfg)?;
        group = group.combine(&r.group);
        primes.push(r);
    }
    let group = normalise(group);
    check_contains(&group, &over_q)?;
    Ok(TowerTorsion { curve: e.label.clone(), field: FieldSpec::Tower(t), over_q, group, primes })
}

/// Torsion over Q(zeta_{p^k}) for k = 1..=levels.
pub fn cyclotomic_levels(
    e: &Curve,
    p: u64,
    levels: u32,
    tables: &KnowledgeTables,
    cfg: &TorsionConfig,
) -> Result<Vec<TowerTorsion>> {
    (1..=levels)
        .map(|k| torsion_over_field(e, &FieldSpec::Cyclo { p, k }.normalize(), tables, cfg))
        .collect()
}

/// Least k with E(Q(zeta_{p^k}))_tors equal to the torsion over the whole tower, with
/// the groups at each level up to the stable one.
pub fn stabilization_level(
    e: &Curve,
    p: u64,
    tables: &KnowledgeTables,
    cfg: &TorsionConfig,
) -> Result<(u32, Vec<TorsionGroup>)> {
    let s = cyclotomic_stable_level(p);
    let groups: Vec<TorsionGroup> = cyclotomic_levels(e, p, s, tables, cfg)?.into_iter().map(|r| r.group).collect();
    for w in groups.windows(2) {
        check_contains(&w[1], &w[0])?;
    }
    let top = *groups.last().unwrap();
    let k = groups.iter().position(|g| *g == top).unwrap() as u32 + 1;
    Ok((k, groups))
}

/// Theorem list for E(K)_tors: Z/n with 1 <= n <= 10 or n in {12, 13, 21, 27}, or
/// Z/2 x Z/2n with 1 <= n <= 4.
pub fn in_k_list(g: &TorsionGroup) -> bool {
    match g.m {
        1 => (1..=10).contains(&g.n) || [12, 13, 21, 27].contains(&g.n),
        2 => [2, 4, 6, 8].contains(&g.n),
        _ => false,
    }
}
