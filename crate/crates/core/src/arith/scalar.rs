//! Field element interface shared by point arithmetic and polynomial routines
//! over number fields and prime fields.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

/// Field element interface. Constants are produced relative to an existing
/// element so that elements carrying their field (a modulus, a number field) work.
pub trait Scalar: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rat(&self, r: &BigRational) -> Option<Self>;
    fn is_zero_elem(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Option<Self>;

    fn neg(&self) -> Self {
        self.zero_like().sub(self)
    }
    fn small(&self, n: i64) -> Self {
        self.from_rat(&crate::arith::rat(n)).expect("small integers embed")
    }
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn from_rat(&self, r: &BigRational) -> Option<Self> {
        Some(r.clone())
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Dense polynomials over a [`Scalar`] field, lowest degree first, trimmed.
pub mod gpoly {
    use super::Scalar;

    pub fn trim<F: Scalar>(mut v: Vec<F>) -> Vec<F> {
        while v.last().is_some_and(|a| a.is_zero_elem()) {
            v.pop();
        }
        v
    }

    pub fn sub<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => x.sub(y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.neg(),
                (None, None) => unreachable!(),
            });
        }
        trim(out)
    }

    pub fn mul<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![a[0].zero_like(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero_elem() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
        trim(out)
    }

    /// Remainder of a by the nonzero polynomial d.
    pub fn rem<F: Scalar>(a: &[F], d: &[F]) -> Vec<F> {
        let dn = d.len() - 1;
        let inv = d[dn].inv().expect("nonzero leading coefficient");
        let mut r = a.to_vec();
        while r.len() > dn {
            let t = r.last().unwrap().mul(&inv);
            let off = r.len() - 1 - dn;
            for (j, dj) in d.iter().enumerate() {
                r[off + j] = r[off + j].sub(&t.mul(dj));
            }
            r.pop();
            r = trim(r);
        }
        trim(r)
    }

    pub fn monic<F: Scalar>(a: &[F]) -> Vec<F> {
        match a.last() {
            None => Vec::new(),
            Some(l) => {
                let inv = l.inv().unwrap();
                a.iter().map(|c| c.mul(&inv)).collect()
            }
        }
    }

    /// Monic gcd.
    pub fn gcd<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b);
            a = b;
            b = r;
        }
        monic(&a)
    }

    pub fn eval<F: Scalar>(a: &[F], x: &F) -> F {
        let mut acc = x.zero_like();
        for c in a.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}
