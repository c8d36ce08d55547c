//! No-root certificates: completely split primes at which a polynomial has no root.
//!
//! If alpha in F is a root of f and q splits completely in F with q prime to the leading
//! coefficient, alpha reduces to a root of f mod q in Z/q. One root-free witness already
//! proves f has no root in F; certificates carry several for redundancy.

use super::fieldspec::{split_condition, FieldSpec};
use super::split::{find_split_primes_after, SPLIT_SEARCH_CAP};
use crate::arith::primes::{factor_big_smooth, factorize, is_prime};
use crate::arith::{parse_rational, ModPoly, RationalPoly};
use crate::elliptic::curve::Curve;
use crate::elliptic::divpoly::{primitive_prime_power_mod, short_mod, short_model_good, x_division_degree, x_division_mod};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::time::Instant;

pub const SCHEMA: &str = "norootcert/1";

/// How the polynomial is built. Division recipes are evaluated by the recurrence mod q;
/// the polynomial is in the integral short coordinate X of the curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolyRecipe {
    /// X_n, or X_{l^k}/X_{l^(k-1)} when `primitive` (n = l^k a prime power).
    Division { ainvs: Vec<String>, n: usize, primitive: bool },
    Explicit { coeffs: Vec<String> },
}

impl PolyRecipe {
    pub fn division(e: &Curve, n: usize) -> PolyRecipe {
        PolyRecipe::Division { ainvs: e.ainvs_strings(), n, primitive: false }
    }

    pub fn primitive_division(e: &Curve, n: usize) -> Result<PolyRecipe> {
        if factorize(n as u64).len() != 1 {
            return Err(Error::InvalidInput(format!("{n} is not a prime power")));
        }
        Ok(PolyRecipe::Division { ainvs: e.ainvs_strings(), n, primitive: true })
    }

    pub fn explicit(f: &RationalPoly) -> PolyRecipe {
        PolyRecipe::Explicit { coeffs: f.coeffs().iter().map(|c| c.to_string()).collect() }
    }

    fn curve(ainvs: &[String]) -> Result<Curve> {
        let a: Vec<BigRational> = ainvs
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| Error::InvalidInput(format!("bad a-invariant {s}"))))
            .collect::<Result<_>>()?;
        let arr: [BigRational; 5] = a.try_into().map_err(|_| Error::InvalidInput("expected 5 a-invariants".into()))?;
        Curve::new(arr, None)
    }

    fn explicit_int(coeffs: &[String]) -> Result<crate::arith::IntPoly> {
        let c: Vec<BigRational> = coeffs
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| Error::InvalidInput(format!("bad coefficient {s}"))))
            .collect::<Result<_>>()?;
        let f = RationalPoly::new(c);
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(f.to_int_parts().1)
    }

    pub fn degree(&self) -> Result<usize> {
        Ok(match self {
            PolyRecipe::Division { n, primitive, .. } => {
                let d = x_division_degree(*n);
                if *primitive {
                    let (l, _) = factorize(*n as u64)[0];
                    d - x_division_degree(*n / l as usize)
                } else {
                    d
                }
            }
            PolyRecipe::Explicit { coeffs } => Self::explicit_int(coeffs)?.deg(),
        })
    }

    /// sha256 of the canonical JSON of the recipe.
    pub fn fingerprint(&self) -> String {
        let s = serde_json::to_string(self).expect("recipe serializes");
        hex::encode(Sha256::digest(s.as_bytes()))
    }

    /// Primes never usable as witnesses: 2, 3, primes of n, bad primes of the curve and of
    /// its a-invariant denominators; for explicit polynomials 2 and the primes of the
    /// leading coefficient of the primitive integral form.
    pub fn excluded_primes(&self) -> Result<BTreeSet<u64>> {
        match self {
            PolyRecipe::Division { ainvs, n, .. } => excluded_primes_for_division_poly(&Self::curve(ainvs)?, *n),
            PolyRecipe::Explicit { coeffs } => {
                let f = Self::explicit_int(coeffs)?;
                let mut s: BTreeSet<u64> = [2].into();
                let lc = f.lead().abs();
                if !lc.is_one() {
                    let ps = factor_big_smooth(&lc, 10_000_000)
                        .ok_or_else(|| Error::Unsupported("leading coefficient has a large prime factor".into()))?;
                    s.extend(ps);
                }
                Ok(s)
            }
        }
    }

    /// The polynomial reduced mod q; q must not be excluded.
    pub fn reduce_mod(&self, q: u64) -> Result<ModPoly> {
        match self {
            PolyRecipe::Division { ainvs, n, primitive } => {
                let e = Self::curve(ainvs)?;
                let model = e.short_model();
                if q < 5 || !e.has_good_reduction(q) || !short_model_good(&model, q) {
                    return Err(Error::BadReduction(q));
                }
                let (a, b) = short_mod(&model, q);
                Ok(if *primitive {
                    let (l, k) = factorize(*n as u64)[0];
                    primitive_prime_power_mod(a, b, l as usize, k, q)
                } else {
                    x_division_mod(a, b, *n, q)
                })
            }
            PolyRecipe::Explicit { coeffs } => {
                let f = Self::explicit_int(coeffs)?;
                let r = f.mod_p(q);
                if r.degree() != Some(f.deg()) {
                    return Err(Error::BadReduction(q));
                }
                Ok(r)
            }
        }
    }
}

/// Primes dividing n, the discriminant of E, a-invariant denominators, and 2 and 3
/// (the short model is only valid away from them).
pub fn excluded_primes_for_division_poly(e: &Curve, n: usize) -> Result<BTreeSet<u64>> {
    if n < 2 {
        return Err(Error::InvalidInput("division index must be at least 2".into()));
    }
    let mut s: BTreeSet<u64> = [2, 3].into();
    s.extend(factorize(n as u64).into_iter().map(|(p, _)| p));
    let bad = e.bad_primes().ok_or_else(|| Error::Unsupported("discriminant has a large prime factor".into()))?;
    s.extend(bad);
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub q: u64,
    pub roots: usize,
    pub millis: u64,
}

/// Fingerprint and recipe of the certified polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyFingerprint {
    pub degree: usize,
    pub sha256: String,
    pub recipe: PolyRecipe,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoRootCertificate {
    pub schema: String,
    pub curve_label: Option<String>,
    pub poly: PolyFingerprint,
    pub division_index: Option<usize>,
    pub field_spec: FieldSpec,
    pub excluded_primes: Vec<u64>,
    pub witnesses: Vec<Witness>,
    pub created: String,
}

#[derive(Clone, Debug)]
pub struct CertifyConfig {
    pub min_witnesses: usize,
    /// Split primes examined before giving up.
    pub max_candidates: usize,
    pub search_cap: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { min_witnesses: 3, max_candidates: 24, search_cap: SPLIT_SEARCH_CAP }
    }
}

#[derive(Clone, Debug)]
pub enum CertifyOutcome {
    Certified(NoRootCertificate),
    /// Every examined split prime showed roots; exact methods must decide.
    RootLikely { witnesses: Vec<Witness> },
}

impl CertifyOutcome {
    pub fn certificate(&self) -> Option<&NoRootCertificate> {
        match self {
            CertifyOutcome::Certified(c) => Some(c),
            CertifyOutcome::RootLikely { .. } => None,
        }
    }
}

fn evaluate(recipe: &PolyRecipe, q: u64) -> Result<Witness> {
    let t = Instant::now();
    let roots = recipe.reduce_mod(q)?.count_roots()?;
    Ok(Witness { q, roots, millis: t.elapsed().as_millis() as u64 })
}

/// Builds a certificate from the smallest root-free split primes. Candidates are taken in
/// increasing order and evaluated in parallel batches, so the chosen witnesses do not
/// depend on scheduling.
pub fn certify_no_root(
    recipe: &PolyRecipe,
    curve_label: Option<&str>,
    field: &FieldSpec,
    extra_excluded: &BTreeSet<u64>,
    cfg: &CertifyConfig,
) -> Result<CertifyOutcome> {
    if cfg.min_witnesses == 0 {
        return Err(Error::InvalidInput("min_witnesses must be positive".into()));
    }
    let mut excluded = recipe.excluded_primes()?;
    excluded.extend(extra_excluded);
    let batch = cfg.min_witnesses.max(rayon::current_num_threads());
    let mut good = Vec::new();
    let mut bad = Vec::new();
    let mut last = 0;
    let mut examined = 0;
    while examined < cfg.max_candidates {
        let n = batch.min(cfg.max_candidates - examined);
        let qs = find_split_primes_after(field, n, &excluded, last, cfg.search_cap)?;
        last = *qs.last().unwrap();
        examined += qs.len();
        let ws: Vec<Witness> = qs.par_iter().map(|&q| evaluate(recipe, q)).collect::<Result<_>>()?;
        for w in ws {
            if good.len() == cfg.min_witnesses {
                break;
            }
            if w.roots == 0 {
                good.push(w);
            } else {
                bad.push(w);
            }
        }
        if good.len() == cfg.min_witnesses {
            let division_index = match recipe {
                PolyRecipe::Division { n, .. } => Some(*n),
                PolyRecipe::Explicit { .. } => None,
            };
            return Ok(CertifyOutcome::Certified(NoRootCertificate {
                schema: SCHEMA.into(),
                curve_label: curve_label.map(str::to_string),
                poly: PolyFingerprint { degree: recipe.degree()?, sha256: recipe.fingerprint(), recipe: recipe.clone() },
                division_index,
                field_spec: field.clone(),
                excluded_primes: excluded.into_iter().collect(),
                witnesses: good,
                created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            }));
        }
    }
    if good.is_empty() {
        Ok(CertifyOutcome::RootLikely { witnesses: bad })
    } else {
        Err(Error::Indeterminate(format!(
            "only {} root-free witnesses among {examined} split primes",
            good.len()
        )))
    }
}

/// Independent re-verification of a certificate. When `ainvs` is given (from a curve
/// record) the recipe must use that curve.
pub fn recheck(cert: &NoRootCertificate, ainvs: Option<&[String]>, min_witnesses: usize) -> Result<()> {
    let fail = |m: String| Err(Error::InvalidInput(m));
    if cert.schema != SCHEMA {
        return fail(format!("unknown schema {}", cert.schema));
    }
    let recipe = &cert.poly.recipe;
    if recipe.fingerprint() != cert.poly.sha256 {
        return fail("fingerprint mismatch".into());
    }
    if recipe.degree()? != cert.poly.degree {
        return fail("degree mismatch".into());
    }
    if let (Some(want), PolyRecipe::Division { ainvs: have, n, .. }) = (ainvs, recipe) {
        let same = want.len() == have.len()
            && want.iter().zip(have).all(|(a, b)| parse_rational(a).is_some() && parse_rational(a) == parse_rational(b));
        if !same {
            return fail("certificate curve differs from the curve record".into());
        }
        if cert.division_index != Some(*n) {
            return fail("division index mismatch".into());
        }
    }
    if !cert.field_spec.is_finite() {
        return fail("certificate field must be finite".into());
    }
    let recorded: BTreeSet<u64> = cert.excluded_primes.iter().copied().collect();
    if !recipe.excluded_primes()?.is_subset(&recorded) {
        return fail("excluded primes incomplete".into());
    }
    let distinct: BTreeSet<u64> = cert.witnesses.iter().map(|w| w.q).collect();
    if distinct.len() < min_witnesses || distinct.len() != cert.witnesses.len() {
        return fail(format!("need {min_witnesses} distinct witnesses"));
    }
    let cond = split_condition(&cert.field_spec)?;
    for w in &cert.witnesses {
        if !is_prime(w.q) || !cond.holds(w.q) || recorded.contains(&w.q) {
            return fail(format!("{} is not an admissible split prime", w.q));
        }
        if w.roots != 0 {
            return fail(format!("witness {} records roots", w.q));
        }
    }
    let counts: Vec<usize> =
        cert.witnesses.par_iter().map(|w| recipe.reduce_mod(w.q)?.count_roots()).collect::<Result<_>>()?;
    if let Some((w, c)) = cert.witnesses.iter().zip(&counts).find(|(_, c)| **c != 0) {
        return fail(format!("{} roots mod {}", c, w.q));
    }
    Ok(())
}

impl NoRootCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<NoRootCertificate> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Whether a rational polynomial's leading coefficient is a unit at q (helper for callers
/// that build explicit recipes).
pub fn lead_is_unit(f: &RationalPoly, q: u64) -> bool {
    let (_, ip) = f.to_int_parts();
    !(ip.lead() % BigInt::from(q)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_is_root_likely_in_its_field() {
        let r = PolyRecipe::explicit(&RationalPoly::from_i64(&[-2, 0, 1]));
        let out = certify_no_root(&r, None, &FieldSpec::Layer { p: 2, n: 1 }, &BTreeSet::new(), &CertifyConfig::default()).unwrap();
        match out {
            CertifyOutcome::RootLikely { witnesses } => assert!(witnesses.iter().all(|w| w.roots == 2)),
            _ => panic!("x^2 - 2 has a root in Q(sqrt 2)"),
        }
        let c = certify_no_root(&r, None, &FieldSpec::Layer { p: 3, n: 1 }, &BTreeSet::new(), &CertifyConfig::default()).unwrap();
        let cert = c.certificate().unwrap();
        recheck(cert, None, 3).unwrap();
    }

    #[test]
    fn tampering_is_detected() {
        let e = Curve::from_i64([0, 0, 0, -1, 0]).unwrap();
        let r = PolyRecipe::primitive_division(&e, 3).unwrap();
        let out = certify_no_root(&r, Some("32a2"), &FieldSpec::rationals(), &BTreeSet::new(), &CertifyConfig::default()).unwrap();
        let cert = out.certificate().unwrap().clone();
        recheck(&cert, None, 3).unwrap();
        let back = NoRootCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        let mut bad = cert.clone();
        bad.witnesses[0].q = 2;
        assert!(recheck(&bad, None, 3).is_err());
        let mut bad = cert.clone();
        bad.witnesses.pop();
        assert!(recheck(&bad, None, 3).is_err());
        let other = vec!["0".into(), "0".into(), "0".into(), "-2".into(), "0".into()];
        assert!(recheck(&cert, Some(&other), 3).is_err());
    }

    #[test]
    fn excluded_examples() {
        let e = Curve::from_i64([0, 0, 0, -1, 0]).unwrap();
        assert_eq!(excluded_primes_for_division_poly(&e, 3).unwrap(), [2, 3].into());
        let e = Curve::from_i64([1, 1, 1, -30, -76]).unwrap();
        assert!(excluded_primes_for_division_poly(&e, 11).unwrap().contains(&11));
        assert!(excluded_primes_for_division_poly(&e, 8).unwrap().contains(&2));
    }
}
