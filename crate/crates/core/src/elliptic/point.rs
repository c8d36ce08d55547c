//! Point arithmetic on a long Weierstrass model over any field implementing [`Scalar`].

use super::curve::{rat_mod, Curve};
use crate::arith::primes::{inv_mod, jacobi, mul_mod, pow_mod};
use crate::error::{Error, Result};
pub use crate::arith::Scalar;
use num_rational::BigRational;
use std::fmt::Debug;

/// Element of the prime field F_q.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Fq {
    pub v: u64,
    pub q: u64,
}

impl Fq {
    pub fn new(v: u64, q: u64) -> Fq {
        Fq { v: v % q, q }
    }

    /// Legendre symbol of the element (0, 1 or -1).
    pub fn legendre(&self) -> i32 {
        if self.v == 0 {
            0
        } else if pow_mod(self.v, (self.q - 1) / 2, self.q) == 1 {
            1
        } else {
            -1
        }
    }
}

impl Scalar for Fq {
    fn zero_like(&self) -> Self {
        Fq::new(0, self.q)
    }
    fn one_like(&self) -> Self {
        Fq::new(1, self.q)
    }
    fn from_rat(&self, r: &BigRational) -> Option<Self> {
        rat_mod(r, self.q).map(|v| Fq::new(v, self.q))
    }
    fn is_zero_elem(&self) -> bool {
        self.v == 0
    }
    fn add(&self, o: &Self) -> Self {
        Fq::new(((self.v as u128 + o.v as u128) % self.q as u128) as u64, self.q)
    }
    fn sub(&self, o: &Self) -> Self {
        Fq::new(((self.v as u128 + self.q as u128 - o.v as u128) % self.q as u128) as u64, self.q)
    }
    fn mul(&self, o: &Self) -> Self {
        Fq::new(mul_mod(self.v, o.v, self.q), self.q)
    }
    fn inv(&self) -> Option<Self> {
        inv_mod(self.v, self.q).map(|v| Fq::new(v, self.q))
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Point<F> {
    Infinity,
    Affine(F, F),
}

impl<F> Point<F> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

/// A long Weierstrass model with coefficients in F.
#[derive(Clone, Debug)]
pub struct CurveOver<F: Scalar> {
    pub a: [F; 5],
}

impl<F: Scalar> CurveOver<F> {
    /// Base change of a rational curve along the embedding given by `like`.
    pub fn from_curve(e: &Curve, like: &F) -> Result<Self> {
        let mut v = Vec::with_capacity(5);
        for a in e.ainvs() {
            v.push(like.from_rat(a).ok_or_else(|| Error::InvalidInput("a-invariant does not embed".into()))?);
        }
        Ok(CurveOver { a: v.try_into().unwrap() })
    }

    pub fn contains(&self, p: &Point<F>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let [a1, a2, a3, a4, a6] = &self.a;
                let lhs = y.mul(y).add(&a1.mul(x).mul(y)).add(&a3.mul(y));
                let rhs = x.mul(x).mul(x).add(&a2.mul(x).mul(x)).add(&a4.mul(x)).add(a6);
                lhs == rhs
            }
        }
    }

    pub fn neg(&self, p: &Point<F>) -> Point<F> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let [a1, _, a3, _, _] = &self.a;
                Point::Affine(x.clone(), y.neg().sub(&a1.mul(x)).sub(a3))
            }
        }
    }

    pub fn add(&self, p: &Point<F>, r: &Point<F>) -> Point<F> {
        let (x1, y1, x2, y2) = match (p, r) {
            (Point::Infinity, _) => return r.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let [a1, a2, a3, a4, a6] = &self.a;
        let (lam, nu);
        if x1 == x2 {
            let denom = y1.add(y1).add(&a1.mul(x1)).add(a3);
            if y1 != y2 || denom.is_zero_elem() {
                return Point::Infinity;
            }
            // Tangent slope.
            let x1sq = x1.mul(x1);
            let num = x1sq.small(3).mul(&x1sq).add(&x1.small(2).mul(a2).mul(x1)).add(a4).sub(&a1.mul(y1));
            let inv = denom.inv().expect("nonzero denominator");
            lam = num.mul(&inv);
            let num_nu = x1sq.mul(x1).neg().add(&a4.mul(x1)).add(&a6.small(2).mul(a6)).sub(&a3.mul(y1));
            nu = num_nu.mul(&inv);
        } else {
            let inv = x2.sub(x1).inv().expect("distinct abscissae");
            lam = y2.sub(y1).mul(&inv);
            nu = y1.mul(x2).sub(&y2.mul(x1)).mul(&inv);
        }
        let x3 = lam.mul(&lam).add(&a1.mul(&lam)).sub(a2).sub(x1).sub(x2);
        let y3 = lam.add(a1).mul(&x3).add(&nu).add(a3).neg();
        Point::Affine(x3, y3)
    }

    pub fn double(&self, p: &Point<F>) -> Point<F> {
        self.add(p, p)
    }

    pub fn mul(&self, n: i64, p: &Point<F>) -> Point<F> {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.double(&base);
            k >>= 1;
        }
        acc
    }

    /// Exact order of p if it is at most `bound`.
    pub fn order(&self, p: &Point<F>, bound: u64) -> Option<u64> {
        let mut q = p.clone();
        for k in 1..=bound {
            if q.is_infinity() {
                return Some(k);
            }
            q = self.add(&q, p);
        }
        None
    }
}

/// Lists every point of E(F_q) (q an odd good prime). Intended for small q.
pub fn enumerate_over_fq(e: &Curve, q: u64) -> Result<Vec<Point<Fq>>> {
    if q == 2 || !e.has_good_reduction(q) {
        return Err(Error::BadReduction(q));
    }
    let c = CurveOver::from_curve(e, &Fq::new(0, q))?;
    let [a1, a2, a3, a4, a6] = c.a;
    let mut out = vec![Point::Infinity];
    for xv in 0..q {
        let x = Fq::new(xv, q);
        for yv in 0..q {
            let y = Fq::new(yv, q);
            let lhs = y.mul(&y).add(&a1.mul(&x).mul(&y)).add(&a3.mul(&y));
            let rhs = x.mul(&x).mul(&x).add(&a2.mul(&x).mul(&x)).add(&a4.mul(&x)).add(&a6);
            if lhs == rhs {
                out.push(Point::Affine(x, y));
            }
        }
    }
    Ok(out)
}

/// #E(F_q) for an odd good prime q, by summing Legendre symbols of 4x^3 + b2 x^2 + 2 b4 x + b6.
pub fn count_points(e: &Curve, q: u64) -> Result<u64> {
    if q == 2 || !e.has_good_reduction(q) {
        return Err(Error::BadReduction(q));
    }
    let [b2, b4, b6, _] = e.b_invariants();
    let m = |r: &BigRational| rat_mod(r, q).ok_or(Error::BadReduction(q));
    let (b2, b4, b6) = (m(&b2)? as i128, m(&b4)? as i128, m(&b6)? as i128);
    let qi = q as i128;
    let mut total: i64 = q as i64 + 1;
    for x in 0..qi {
        let d = ((((4 * x + b2) % qi) * x + 2 * b4) % qi * x + b6) % qi;
        total += jacobi(d as i64, q) as i64;
    }
    Ok(total as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn count_matches_enumeration_and_hasse() {
        let e = Curve::from_i64([1, 1, 1, -30, -76]).unwrap();
        for q in [3u64, 5, 7, 13, 17, 19, 23, 29, 31] {
            if !e.has_good_reduction(q) {
                continue;
            }
            let n = count_points(&e, q).unwrap();
            assert_eq!(n, enumerate_over_fq(&e, q).unwrap().len() as u64);
            let diff = (n as f64 - q as f64 - 1.0).abs();
            assert!(diff <= 2.0 * (q as f64).sqrt(), "Hasse at {q}");
        }
    }

    #[test]
    fn group_law_over_q() {
        // 11a3: y^2 + y = x^3 - x^2, (0,0) has order 5.
        let e = Curve::from_i64([0, -1, 1, 0, 0]).unwrap();
        let c = CurveOver::from_curve(&e, &rat(0)).unwrap();
        let p = Point::Affine(rat(0), rat(0));
        assert!(c.contains(&p));
        assert_eq!(c.order(&p, 20), Some(5));
        assert!(c.contains(&c.mul(2, &p)));
        assert_eq!(c.add(&p, &c.neg(&p)), Point::Infinity);
    }

    #[test]
    fn associativity_over_fq() {
        let e = Curve::from_i64([1, 0, 1, 4, -6]).unwrap();
        let pts = enumerate_over_fq(&e, 23).unwrap();
        let c = CurveOver::from_curve(&e, &Fq::new(0, 23)).unwrap();
        let n = pts.len() as i64;
        for p in pts.iter().take(8) {
            assert!(c.mul(n, p).is_infinity());
            for r in pts.iter().skip(3).take(5) {
                for s in pts.iter().skip(7).take(4) {
                    assert_eq!(c.add(&c.add(p, r), s), c.add(p, &c.add(r, s)));
                }
            }
        }
    }
}
