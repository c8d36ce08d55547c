//! Elliptic curves over Q in long Weierstrass form.

use crate::arith::primes::factor_big_smooth;
use crate::arith::rat;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Curve {
    pub label: Option<String>,
    a: [BigRational; 5],
    b2: BigRational,
    b4: BigRational,
    b6: BigRational,
    b8: BigRational,
    c4: BigRational,
    c6: BigRational,
    disc: BigRational,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Curve({}{:?})", self.label.as_deref().map(|l| format!("{l} ")).unwrap_or_default(), self.ainvs_strings())
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.ainvs_strings().join(",");
        match &self.label {
            Some(l) => write!(f, "{l} [{s}]"),
            None => write!(f, "[{s}]"),
        }
    }
}

/// The integral short model Y^2 = X^3 + A X + B with X = alpha x + beta.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortModel {
    pub a: BigInt,
    pub b: BigInt,
    /// X = alpha * x + beta.
    pub alpha: BigRational,
    pub beta: BigRational,
    /// Y = gamma * (2y + a1 x + a3).
    pub gamma: BigRational,
}

impl Curve {
    pub fn new(ainvs: [BigRational; 5], label: Option<String>) -> Result<Curve> {
        let [a1, a2, a3, a4, a6] = ainvs.clone();
        let b2 = &a1 * &a1 + rat(4) * &a2;
        let b4 = rat(2) * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + rat(4) * &a6;
        let b8 = &a1 * &a1 * &a6 + rat(4) * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        let c4 = &b2 * &b2 - rat(24) * &b4;
        let c6 = -(&b2 * &b2 * &b2) + rat(36) * &b2 * &b4 - rat(216) * &b6;
        let disc = -(&b2 * &b2 * &b8) - rat(8) * &b4 * &b4 * &b4 - rat(27) * &b6 * &b6
            + rat(9) * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(Error::InvalidInput("singular curve: discriminant is zero".into()));
        }
        Ok(Curve {
            label,
            a: ainvs,
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
        })
    }

    pub fn from_i64(ainvs: [i64; 5]) -> Result<Curve> {
        Curve::new(ainvs.map(rat), None)
    }

    pub fn with_label(mut self, label: &str) -> Curve {
        self.label = Some(label.to_string());
        self
    }

    pub fn ainvs(&self) -> &[BigRational; 5] {
        &self.a
    }

    pub fn a1(&self) -> &BigRational {
        &self.a[0]
    }
    pub fn a2(&self) -> &BigRational {
        &self.a[1]
    }
    pub fn a3(&self) -> &BigRational {
        &self.a[2]
    }
    pub fn a4(&self) -> &BigRational {
        &self.a[3]
    }
    pub fn a6(&self) -> &BigRational {
        &self.a[4]
    }

    pub fn ainvs_strings(&self) -> Vec<String> {
        self.a.iter().map(|x| x.to_string()).collect()
    }

    pub fn b_invariants(&self) -> [BigRational; 4] {
        [self.b2.clone(), self.b4.clone(), self.b6.clone(), self.b8.clone()]
    }

    pub fn c4(&self) -> &BigRational {
        &self.c4
    }

    pub fn c6(&self) -> &BigRational {
        &self.c6
    }

    pub fn discriminant(&self) -> &BigRational {
        &self.disc
    }

    pub fn j_invariant(&self) -> BigRational {
        &self.c4 * &self.c4 * &self.c4 / &self.disc
    }

    /// (discriminant, j-invariant).
    pub fn invariants(&self) -> (BigRational, BigRational) {
        (self.disc.clone(), self.j_invariant())
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|x| x.is_integer())
    }

    /// Curve with the given j-invariant.
    pub fn from_j(j: &BigRational) -> Curve {
        if j.is_zero() {
            return Curve::from_i64([0, 0, 0, 0, 1]).unwrap();
        }
        if *j == rat(1728) {
            return Curve::from_i64([0, 0, 0, 1, 0]).unwrap();
        }
        let k = rat(1728) - j;
        let a4 = rat(3) * j * &k;
        let a6 = rat(2) * j * &k * &k;
        Curve::new([rat(0), rat(0), rat(0), a4, a6], None).unwrap()
    }

    /// Rational short model y^2 = x^3 - c4/48 x - c6/864 obtained by completing the square and cube.
    pub fn short_coefficients(&self) -> (BigRational, BigRational) {
        (-&self.c4 / rat(48), -&self.c6 / rat(864))
    }

    /// Quadratic twist by d in short form: (a, b) -> (a d^2, b d^3).
    pub fn quadratic_twist(&self, d: i64) -> Result<Curve> {
        if d == 0 {
            return Err(Error::InvalidInput("twist parameter must be nonzero".into()));
        }
        let (a, b) = self.short_coefficients();
        let d = rat(d);
        Curve::new(
            [rat(0), rat(0), rat(0), a * &d * &d, b * &d * &d * &d],
            None,
        )
    }

    /// Integral short model: A = -27 c4 u^4, B = -54 c6 u^6, X = u^2 (36 x + 3 b2),
    /// Y = 108 u^3 (2y + a1 x + a3), with u the least positive integer making A, B integral.
    pub fn short_model(&self) -> ShortModel {
        let a0 = rat(-27) * &self.c4;
        let b0 = rat(-54) * &self.c6;
        let mut u = BigInt::one();
        let den = a0.denom().lcm(b0.denom());
        if !den.is_one() {
            // Smallest u with den | u^4 and den | u^6 componentwise is bounded by den itself.
            let primes = factor_big_smooth(&den, 1_000_000).unwrap_or_default();
            for p in primes {
                let pb = BigInt::from(p);
                loop {
                    let u4 = num_traits::pow(u.clone(), 4);
                    let u6 = num_traits::pow(u.clone(), 6);
                    let ok_a = (&a0 * BigRational::from_integer(u4)).denom() % &pb != BigInt::zero();
                    let ok_b = (&b0 * BigRational::from_integer(u6)).denom() % &pb != BigInt::zero();
                    if ok_a && ok_b {
                        break;
                    }
                    u *= &pb;
                }
            }
        }
        let ur = BigRational::from_integer(u.clone());
        let u2 = &ur * &ur;
        let a = (a0 * &u2 * &u2).to_integer();
        let b = (b0 * &u2 * &u2 * &u2).to_integer();
        ShortModel {
            a,
            b,
            alpha: rat(36) * &u2,
            beta: rat(3) * &self.b2 * &u2,
            gamma: rat(108) * &u2 * &ur,
        }
    }

    /// Primes dividing the numerator or denominator of the discriminant or of any a-invariant
    /// denominator. Returns None if the discriminant cannot be factored with small primes.
    pub fn bad_primes(&self) -> Option<BTreeSet<u64>> {
        let mut s = BTreeSet::new();
        let num = self.disc.numer().abs();
        let den = self.disc.denom().abs();
        for v in [num, den] {
            if v.is_one() {
                continue;
            }
            for p in factor_big_smooth(&v, 10_000_000)? {
                s.insert(p);
            }
        }
        for a in &self.a {
            if !a.denom().is_one() {
                for p in factor_big_smooth(a.denom(), 10_000_000)? {
                    s.insert(p);
                }
            }
        }
        Some(s)
    }

    /// Good reduction at q: q odd, q does not divide any a-invariant denominator nor Δ.
    pub fn has_good_reduction(&self, q: u64) -> bool {
        let qb = BigInt::from(q);
        if self.a.iter().any(|a| (a.denom() % &qb).is_zero()) {
            return false;
        }
        !(self.disc.numer() % &qb).is_zero() && !(self.disc.denom() % &qb).is_zero()
    }

    /// a-invariants reduced mod q (requires q prime to their denominators).
    pub fn ainvs_mod(&self, q: u64) -> Result<[u64; 5]> {
        let mut out = [0u64; 5];
        for (o, a) in out.iter_mut().zip(self.a.iter()) {
            *o = rat_mod(a, q).ok_or(Error::BadReduction(q))?;
        }
        Ok(out)
    }
}

/// Reduction of a rational modulo a prime q, if its denominator is a unit.
pub fn rat_mod(a: &BigRational, q: u64) -> Option<u64> {
    let qb = BigInt::from(q);
    let n = a.numer().mod_floor(&qb).to_u64()?;
    let d = a.denom().mod_floor(&qb).to_u64()?;
    let dinv = crate::arith::primes::inv_mod(d, q)?;
    Some(crate::arith::primes::mul_mod(n, dinv, q))
}

/// A curve record as stored in the JSON-lines curve database.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub label: String,
    pub ainvs: Vec<serde_json::Value>,
    pub source: String,
}

impl CurveRecord {
    pub fn to_curve(&self) -> Result<Curve> {
        if self.ainvs.len() != 5 {
            return Err(Error::InvalidInput(format!("{}: expected 5 a-invariants", self.label)));
        }
        let mut a: Vec<BigRational> = Vec::new();
        for v in &self.ainvs {
            let s = match v {
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::String(s) => s.clone(),
                _ => return Err(Error::InvalidInput(format!("{}: bad a-invariant {v}", self.label))),
            };
            a.push(
                crate::arith::parse_rational(&s)
                    .ok_or_else(|| Error::InvalidInput(format!("{}: bad a-invariant {s}", self.label)))?,
            );
        }
        let arr: [BigRational; 5] = a.try_into().unwrap();
        Curve::new(arr, Some(self.label.clone()))
    }

    pub fn from_curve(c: &Curve, source: &str) -> CurveRecord {
        CurveRecord {
            label: c.label.clone().unwrap_or_default(),
            ainvs: c
                .ainvs()
                .iter()
                .map(|a| {
                    if a.is_integer() {
                        serde_json::Value::Number(a.to_integer().to_i64().unwrap().into())
                    } else {
                        serde_json::Value::String(a.to_string())
                    }
                })
                .collect(),
            source: source.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_of_simple_curves() {
        let e = Curve::from_i64([0, 0, 0, -1, 0]).unwrap();
        assert_eq!(e.invariants(), (rat(64), rat(1728)));
        let e = Curve::from_i64([0, 0, 0, 0, 1]).unwrap();
        assert_eq!(e.invariants(), (rat(-432), rat(0)));
    }

    #[test]
    fn singular_rejected() {
        assert!(Curve::from_i64([0, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn from_j_round_trip() {
        for j in [rat(0), rat(1728), rat(-3375), rat(8000), BigRational::new((-289).into(), 2.into())] {
            assert_eq!(Curve::from_j(&j).j_invariant(), j);
        }
    }

    #[test]
    fn twist_examples() {
        let e = Curve::from_i64([0, 0, 0, -1, 0]).unwrap();
        assert_eq!(e.quadratic_twist(-1).unwrap().ainvs(), e.ainvs());
        let e = Curve::from_i64([0, 0, 0, 0, 1]).unwrap();
        let t = e.quadratic_twist(2).unwrap();
        assert_eq!(t.ainvs(), Curve::from_i64([0, 0, 0, 0, 8]).unwrap().ainvs());
        assert_eq!(t.j_invariant(), e.j_invariant());
    }

    #[test]
    fn short_model_is_isomorphic() {
        let e = Curve::from_i64([1, 1, 1, -30, -76]).unwrap();
        let s = e.short_model();
        let es = Curve::new([rat(0), rat(0), rat(0), BigRational::from_integer(s.a.clone()), BigRational::from_integer(s.b.clone())], None).unwrap();
        assert_eq!(es.j_invariant(), e.j_invariant());
        // Non-integral input still yields an integral model.
        let e = Curve::new([rat(0), rat(0), rat(0), BigRational::new(1.into(), 4.into()), rat(1)], None).unwrap();
        let s = e.short_model();
        let es = Curve::new([rat(0), rat(0), rat(0), BigRational::from_integer(s.a), BigRational::from_integer(s.b)], None).unwrap();
        assert_eq!(es.j_invariant(), e.j_invariant());
    }
}
