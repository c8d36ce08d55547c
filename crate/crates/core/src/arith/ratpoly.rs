//! Dense univariate polynomials over Q.

use super::intpoly::{write_poly, IntPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Coefficients lowest degree first; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    c: Vec<BigRational>,
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPoly({self})")
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.c.iter().map(|a| a.to_string()).collect())
    }
}

impl Serialize for RationalPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.c.iter().map(|a| a.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let c = v
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RationalPoly::new(c))
    }
}

/// Parses "a" or "a/b" into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|a| a.is_zero()) {
        v.pop();
    }
}

impl RationalPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        trim(&mut c);
        RationalPoly { c }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        RationalPoly::new(c.iter().map(|&a| rat(a)).collect())
    }

    pub fn from_int_poly(p: &IntPoly) -> Self {
        RationalPoly::new(
            p.coeffs()
                .iter()
                .map(|a| BigRational::from_integer(a.clone()))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        RationalPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        RationalPoly::from_i64(&[1])
    }

    pub fn x() -> Self {
        RationalPoly::from_i64(&[0, 1])
    }

    pub fn constant(a: BigRational) -> Self {
        RationalPoly::new(vec![a])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.c.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lead(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &RationalPoly) -> RationalPoly {
        let n = self.c.len().max(o.c.len());
        RationalPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &RationalPoly) -> RationalPoly {
        let n = self.c.len().max(o.c.len());
        RationalPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> RationalPoly {
        RationalPoly::new(self.c.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, a: &BigRational) -> RationalPoly {
        RationalPoly::new(self.c.iter().map(|b| b * a).collect())
    }

    pub fn mul(&self, o: &RationalPoly) -> RationalPoly {
        if self.is_zero() || o.is_zero() {
            return RationalPoly::zero();
        }
        if self.c.len() * o.c.len() > 400 {
            let (ca, pa) = self.to_int_parts();
            let (cb, pb) = o.to_int_parts();
            return RationalPoly::from_int_poly(&pa.mul(&pb)).scale(&(ca * cb));
        }
        let mut out = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        RationalPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> RationalPoly {
        let mut r = RationalPoly::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn monic(&self) -> RationalPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().recip();
        self.scale(&l)
    }

    pub fn divrem(&self, d: &RationalPoly) -> (RationalPoly, RationalPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dn = d.deg();
        if self.c.len() <= dn {
            return (RationalPoly::zero(), self.clone());
        }
        let inv = d.lead().recip();
        let mut r = self.c.clone();
        let mut quo = vec![BigRational::zero(); r.len() - dn];
        for i in (dn..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let t = &r[i] * &inv;
            for j in 0..=dn {
                let s = &t * &d.c[j];
                r[i - dn + j] -= s;
            }
            quo[i - dn] = t;
        }
        r.truncate(dn);
        (RationalPoly::new(quo), RationalPoly::new(r))
    }

    pub fn rem(&self, d: &RationalPoly) -> RationalPoly {
        self.divrem(d).1
    }

    /// Monic gcd over Q.
    pub fn gcd(&self, o: &RationalPoly) -> RationalPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.to_primitive_rational();
        }
        a.monic()
    }

    /// Returns (g, s, t) with s*self + t*o = g, g monic.
    pub fn ext_gcd(&self, o: &RationalPoly) -> (RationalPoly, RationalPoly, RationalPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (RationalPoly::one(), RationalPoly::zero());
        let (mut t0, mut t1) = (RationalPoly::zero(), RationalPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.lead().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    pub fn derivative(&self) -> RationalPoly {
        RationalPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * rat(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.c
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    /// Composition self(g).
    pub fn compose(&self, g: &RationalPoly) -> RationalPoly {
        let mut r = RationalPoly::zero();
        for a in self.c.iter().rev() {
            r = r.mul(g).add(&RationalPoly::constant(a.clone()));
        }
        r
    }

    /// Splits self = content * primitive where primitive is in Z[x] with positive
    /// leading coefficient and unit content.
    pub fn to_int_parts(&self) -> (BigRational, IntPoly) {
        if self.is_zero() {
            return (BigRational::zero(), IntPoly::zero());
        }
        let den = self
            .c
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let ints: Vec<BigInt> = self
            .c
            .iter()
            .map(|a| (a * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let p = IntPoly::new(ints);
        let mut g = p.content();
        if p.lead().is_negative() {
            g = -g;
        }
        let prim = IntPoly::new(p.coeffs().iter().map(|a| a / &g).collect());
        (BigRational::new(g, den), prim)
    }

    /// Primitive integral representative as a rational polynomial.
    pub fn to_primitive_rational(&self) -> RationalPoly {
        RationalPoly::from_int_poly(&self.to_int_parts().1)
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.c.iter().all(|a| a.is_integer())
    }

    /// Integer coefficients when the polynomial is integral.
    pub fn to_int_poly(&self) -> Option<IntPoly> {
        if !self.is_integral() {
            return None;
        }
        Some(IntPoly::new(self.c.iter().map(|a| a.to_integer()).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_of_squares() {
        let a = RationalPoly::from_i64(&[1, 1]);
        let b = RationalPoly::from_i64(&[-1, 1]);
        assert_eq!(a.mul(&b), RationalPoly::from_i64(&[-1, 0, 1]));
        assert!(RationalPoly::zero().mul(&a).is_zero());
        assert_eq!(RationalPoly::zero().degree(), None);
    }

    #[test]
    fn int_parts_round_trip() {
        let f = RationalPoly::new(vec![
            BigRational::new(3.into(), 4.into()),
            BigRational::new((-3).into(), 2.into()),
        ]);
        let (c, p) = f.to_int_parts();
        assert_eq!(RationalPoly::from_int_poly(&p).scale(&c), f);
        assert!(p.lead().is_positive());
    }

    #[test]
    fn gcd_finds_common_factor() {
        let a = RationalPoly::from_i64(&[-1, 0, 1]);
        let b = RationalPoly::from_i64(&[-2, 1, 1]);
        assert_eq!(a.gcd(&b), RationalPoly::from_i64(&[-1, 1]));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("-17/2"), Some(BigRational::new((-17).into(), 2.into())));
        assert_eq!(parse_rational("5"), Some(rat(5)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
