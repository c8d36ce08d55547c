//! Abelian fields: finite layers, cyclotomic fields and composita, and the infinite towers.

use crate::arith::primes::{euler_phi, factorize, gcd_u64, is_prime, mul_mod, pow_mod, valuation};
use crate::cyclo::units_mod;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tower {
    /// The Z_p-extension Q_{inf,p}.
    Zp(u64),
    /// Compositum of all Z_p-extensions.
    K,
    /// Compositum of the Z_p-extensions with p >= 5.
    K5,
    /// Q(zeta_{p^inf}).
    Cyclo(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    /// Q_{n,p}, degree p^n.
    Layer { p: u64, n: u32 },
    /// Q(zeta_{p^k}).
    Cyclo { p: u64, k: u32 },
    /// Unique subfield of degree d of Q(zeta_{p^k}), p odd.
    CycloSub { p: u64, k: u32, d: u64 },
    /// Compositum of layers with distinct primes, sorted by p; empty means Q.
    Compositum(Vec<(u64, u32)>),
    Tower(Tower),
}

impl FieldSpec {
    pub fn rationals() -> FieldSpec {
        FieldSpec::Compositum(Vec::new())
    }

    pub fn compositum(layers: impl IntoIterator<Item = (u64, u32)>) -> Result<FieldSpec> {
        let mut v: Vec<(u64, u32)> = layers.into_iter().filter(|&(_, n)| n > 0).collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("at most one layer per prime".into()));
        }
        if v.iter().any(|&(p, _)| !is_prime(p)) {
            return Err(Error::InvalidInput("layer primes must be prime".into()));
        }
        Ok(FieldSpec::Compositum(v))
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, FieldSpec::Tower(_))
    }

    /// Degree over Q of a finite field.
    pub fn degree(&self) -> Option<u64> {
        Some(match self {
            FieldSpec::Layer { p, n } => p.pow(*n),
            FieldSpec::Cyclo { p, k } => euler_phi(p.pow(*k)),
            FieldSpec::CycloSub { d, .. } => *d,
            FieldSpec::Compositum(v) => v.iter().map(|(p, n)| p.pow(*n)).product(),
            FieldSpec::Tower(_) => return None,
        })
    }

    /// Conductor M and the subgroup H of (Z/M)^x fixing the field inside Q(zeta_M).
    pub fn abelian_data(&self) -> Result<(u64, Vec<u64>)> {
        match self {
            FieldSpec::Layer { p, n } => Ok(crate::cyclo::layer_group(*p, *n)),
            FieldSpec::Cyclo { p, k } => Ok((p.pow(*k), vec![1 % p.pow(*k)])),
            FieldSpec::CycloSub { p, k, d } => {
                let m = p.pow(*k);
                let phi = euler_phi(m);
                if *p == 2 || !phi.is_multiple_of(*d) {
                    return Err(Error::InvalidInput(format!("no unique subfield of degree {d} in Q(zeta_{m})")));
                }
                let e = phi / d;
                Ok((m, units_mod(m).into_iter().filter(|&c| pow_mod(c, e, m) == 1).collect()))
            }
            FieldSpec::Compositum(v) => {
                let parts: Vec<(u64, Vec<u64>)> =
                    v.iter().map(|&(p, n)| crate::cyclo::layer_group(p, n)).collect();
                let m: u64 = parts.iter().map(|(m, _)| *m).product();
                if m == 1 {
                    return Ok((1, vec![0]));
                }
                let sets: Vec<(u64, BTreeSet<u64>)> =
                    parts.into_iter().map(|(mi, h)| (mi, h.into_iter().collect())).collect();
                let h = units_mod(m)
                    .into_iter()
                    .filter(|c| sets.iter().all(|(mi, s)| s.contains(&(c % mi))))
                    .collect();
                Ok((m, h))
            }
            FieldSpec::Tower(_) => Err(Error::InvalidInput("towers have no finite presentation".into())),
        }
    }

    /// Normal form: layers of degree one collapse to Q, single layers and
    /// full cyclotomic subfields use their own kinds.
    pub fn normalize(self) -> FieldSpec {
        match self {
            FieldSpec::Layer { n: 0, .. } => FieldSpec::rationals(),
            FieldSpec::Compositum(v) if v.len() == 1 => FieldSpec::Layer { p: v[0].0, n: v[0].1 },
            FieldSpec::CycloSub { p, k, d } => {
                if d == 1 {
                    FieldSpec::rationals()
                } else if d == euler_phi(p.pow(k)) {
                    FieldSpec::Cyclo { p, k }
                } else if d == p.pow(valuation(d, p)) && k == valuation(d, p) + 1 {
                    FieldSpec::Layer { p, n: k - 1 }
                } else {
                    FieldSpec::CycloSub { p, k, d }
                }
            }
            f => f,
        }
    }

    /// Finite subfield of the given degree of a tower, if it exists and is unique.
    pub fn unique_subfield(&self, d: u64) -> Result<Option<FieldSpec>> {
        let FieldSpec::Tower(t) = self else {
            return Err(Error::InvalidInput("unique_subfield expects a tower".into()));
        };
        if d == 0 {
            return Err(Error::InvalidInput("degree must be positive".into()));
        }
        let f = factorize(d);
        Ok(match t {
            Tower::K => Some(FieldSpec::compositum(f.iter().map(|&(p, e)| (p, e)))?.normalize()),
            Tower::K5 => {
                if f.iter().any(|&(p, _)| p < 5) {
                    None
                } else {
                    Some(FieldSpec::compositum(f.iter().map(|&(p, e)| (p, e)))?.normalize())
                }
            }
            Tower::Zp(p) => match f.as_slice() {
                [] => Some(FieldSpec::rationals()),
                [(q, e)] if q == p => Some(FieldSpec::Layer { p: *p, n: *e }),
                _ => None,
            },
            Tower::Cyclo(p) => {
                if d == 1 {
                    Some(FieldSpec::rationals())
                } else if *p == 2 {
                    // Gal = Z/2 x Z_2 is not procyclic: every 2-power degree d >= 2 has three subfields.
                    None
                } else {
                    let a = valuation(d, *p);
                    let rest = d / p.pow(a);
                    if (p - 1) % rest != 0 {
                        None
                    } else {
                        Some(FieldSpec::CycloSub { p: *p, k: a + 1, d }.normalize())
                    }
                }
            }
        })
    }

    /// Whether this finite field is contained in the given tower.
    pub fn inside(&self, t: Tower) -> bool {
        let Ok((m, h)) = self.abelian_data() else {
            return false;
        };
        match t {
            Tower::K | Tower::K5 | Tower::Zp(_) => {
                // Totally real with Galois group of prime-power layers: compare with the
                // unique subfield of the same degree.
                let Some(d) = self.degree() else { return false };
                match FieldSpec::Tower(t).unique_subfield(d) {
                    Ok(Some(f)) => f.abelian_data().map(|x| same_field(x, (m, h.clone()))).unwrap_or(false),
                    _ => false,
                }
            }
            Tower::Cyclo(p) => {
                // Conductor must be a power of p.
                let (mc, _) = reduce_conductor(m, &h);
                factorize(mc).iter().all(|&(q, _)| q == p)
            }
        }
    }
}

/// Two presentations describe the same field.
pub fn same_field(a: (u64, Vec<u64>), b: (u64, Vec<u64>)) -> bool {
    reduce_conductor(a.0, &a.1) == reduce_conductor(b.0, &b.1)
}

/// Smallest conductor M' | M with Q(zeta_M)^H inside Q(zeta_M'), and the image of H mod M'.
pub fn reduce_conductor(m: u64, h: &[u64]) -> (u64, Vec<u64>) {
    if m == 1 {
        return (1, vec![0]);
    }
    let hs: BTreeSet<u64> = h.iter().copied().collect();
    let units = units_mod(m);
    for mp in crate::arith::primes::divisors(m) {
        if mp % 4 == 2 {
            continue;
        }
        let ker_ok = units.iter().filter(|&&c| c % mp == 1 % mp).all(|c| hs.contains(c));
        if ker_ok {
            if mp == 1 {
                return (1, vec![0]);
            }
            let img: BTreeSet<u64> = h.iter().map(|c| c % mp).collect();
            return (mp, img.into_iter().collect());
        }
    }
    (m, h.to_vec())
}

/// Index-`k` subgroups of H that contain H0, inside (Z/m)^x, by brute force on small groups.
pub fn intermediate_subgroups(m: u64, h: &[u64], h0: &[u64], index: usize) -> Vec<Vec<u64>> {
    if !h.len().is_multiple_of(index) {
        return Vec::new();
    }
    let target = h.len() / index;
    let h0s: BTreeSet<u64> = h0.iter().copied().collect();
    let mut found: BTreeSet<Vec<u64>> = BTreeSet::new();
    // Every subgroup containing H0 is generated by H0 and at most two extra elements for the
    // groups met here (quotients of (Z/m)^x of rank <= 3); search pairs of generators.
    let reps: Vec<u64> = crate::cyclo::coset_reps_within(m, h, h0);
    for (i, &a) in reps.iter().enumerate() {
        for &b in reps[i..].iter() {
            let mut gens: Vec<u64> = h0s.iter().copied().collect();
            gens.push(a);
            gens.push(b);
            let g = crate::cyclo::subgroup_generated(m, &gens);
            if g.len() == target {
                found.insert(g);
            }
        }
    }
    if target == h0.len() {
        let mut v: Vec<u64> = h0.to_vec();
        v.sort_unstable();
        found.insert(v);
    }
    found.into_iter().collect()
}

fn parse_pair(s: &str) -> Option<(u64, u32)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<FieldSpec> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse field spec '{s}'"));
        let inner = |pre: &str| s.strip_prefix(pre).and_then(|r| r.strip_suffix(')'));
        let check_p = |p: u64| if is_prime(p) { Ok(p) } else { Err(bad()) };
        match s {
            "Q" => return Ok(FieldSpec::rationals()),
            "K" => return Ok(FieldSpec::Tower(Tower::K)),
            "K5" | "K>=5" => return Ok(FieldSpec::Tower(Tower::K5)),
            _ => {}
        }
        if let Some(r) = s.strip_prefix("Zp:") {
            return Ok(FieldSpec::Tower(Tower::Zp(check_p(r.parse().map_err(|_| bad())?)?)));
        }
        if let Some(r) = s.strip_prefix("cyclo:") {
            let (p, k) = r.split_once('^').ok_or_else(bad)?;
            let p = check_p(p.parse().map_err(|_| bad())?)?;
            if k == "inf" {
                return Ok(FieldSpec::Tower(Tower::Cyclo(p)));
            }
            return Ok(FieldSpec::Cyclo { p, k: k.parse().map_err(|_| bad())? });
        }
        if let Some(r) = s.strip_prefix("layer:") {
            let (p, n) = r.split_once('^').ok_or_else(bad)?;
            return Ok(FieldSpec::Layer { p: check_p(p.parse().map_err(|_| bad())?)?, n: n.parse().map_err(|_| bad())? });
        }
        if let Some(r) = inner("LAYER(") {
            let (p, n) = parse_pair(r).ok_or_else(bad)?;
            return Ok(FieldSpec::Layer { p: check_p(p)?, n });
        }
        if let Some(r) = inner("CYCLO(") {
            let (p, k) = parse_pair(r).ok_or_else(bad)?;
            return Ok(FieldSpec::Cyclo { p: check_p(p)?, k });
        }
        if let Some(r) = inner("CYCLOSUB(") {
            let v: Vec<u64> = r.split(',').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
            let [p, k, d] = v[..] else { return Err(bad()) };
            let f = FieldSpec::CycloSub { p: check_p(p)?, k: k as u32, d };
            f.abelian_data()?;
            return Ok(f);
        }
        if let Some(r) = inner("COMPOSITUM(") {
            let mut layers = Vec::new();
            for part in r.split("LAYER(").skip(1) {
                let part = part.trim_end_matches([',', ' ']).trim_end_matches(')');
                layers.push(parse_pair(part).ok_or_else(bad)?);
            }
            return FieldSpec::compositum(layers);
        }
        match s {
            "Q_inf" => Err(bad()),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Layer { p, n } => write!(f, "LAYER({p},{n})"),
            FieldSpec::Cyclo { p, k } => write!(f, "CYCLO({p},{k})"),
            FieldSpec::CycloSub { p, k, d } => write!(f, "CYCLOSUB({p},{k},{d})"),
            FieldSpec::Compositum(v) if v.is_empty() => write!(f, "Q"),
            FieldSpec::Compositum(v) => {
                let parts: Vec<String> = v.iter().map(|(p, n)| format!("LAYER({p},{n})")).collect();
                write!(f, "COMPOSITUM({})", parts.join(","))
            }
            FieldSpec::Tower(Tower::K) => write!(f, "K"),
            FieldSpec::Tower(Tower::K5) => write!(f, "K5"),
            FieldSpec::Tower(Tower::Zp(p)) => write!(f, "Zp:{p}"),
            FieldSpec::Tower(Tower::Cyclo(p)) => write!(f, "cyclo:{p}^inf"),
        }
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The congruence deciding complete splitting: q splits iff q mod `modulus` is in `residues`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCondition {
    pub modulus: u64,
    pub residues: BTreeSet<u64>,
}

impl SplitCondition {
    pub fn holds(&self, q: u64) -> bool {
        if self.modulus == 1 {
            return true;
        }
        gcd_u64(q, self.modulus) == 1 && self.residues.contains(&(q % self.modulus))
    }
}

/// Splitting law of a finite abelian field.
pub fn split_condition(f: &FieldSpec) -> Result<SplitCondition> {
    let (m, h) = f.abelian_data()?;
    Ok(SplitCondition { modulus: m, residues: h.into_iter().collect() })
}

/// The explicit congruence for a single layer or cyclotomic field, used to cross-check
/// the group-theoretic condition.
pub fn split_congruence(f: &FieldSpec, q: u64) -> Option<bool> {
    match *f {
        FieldSpec::Layer { p: 2, n } => {
            let m = 1u64 << (n + 2);
            Some(q % m == 1 || q % m == m - 1)
        }
        FieldSpec::Layer { p, n } => {
            let m = p.pow(n + 1);
            Some(!q.is_multiple_of(p) && pow_mod(q % m, p - 1, m) == 1)
        }
        FieldSpec::Cyclo { p, k } => Some(q % p.pow(k) == 1),
        _ => None,
    }
}

/// Residue products used when enumerating cosets.
pub fn mul_res(a: u64, b: u64, m: u64) -> u64 {
    mul_mod(a, b, m)
}
