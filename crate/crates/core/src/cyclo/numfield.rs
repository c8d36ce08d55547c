//! Number fields Q[x]/(P) for monic P, with elements kept fully reduced.

use crate::arith::{RationalPoly, Scalar};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, PartialEq, Eq)]
pub struct NumberField {
    poly: RationalPoly,
    name: String,
}

impl NumberField {
    /// `poly` must be monic and irreducible over Q; irreducibility is the caller's contract.
    pub fn new(poly: RationalPoly, name: impl Into<String>) -> Arc<NumberField> {
        assert!(poly.lead().is_one(), "defining polynomial must be monic");
        Arc::new(NumberField { poly, name: name.into() })
    }

    pub fn poly(&self) -> &RationalPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.deg()
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

#[derive(Clone)]
pub struct NfElem {
    k: Arc<NumberField>,
    c: RationalPoly,
}

impl PartialEq for NfElem {
    fn eq(&self, o: &Self) -> bool {
        (Arc::ptr_eq(&self.k, &o.k) || self.k == o.k) && self.c == o.c
    }
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] in {}", self.c, self.k.name)
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.c)
    }
}

impl NfElem {
    pub fn new(k: &Arc<NumberField>, c: RationalPoly) -> NfElem {
        let c = if c.degree().is_some_and(|d| d >= k.degree()) { c.rem(&k.poly) } else { c };
        NfElem { k: k.clone(), c }
    }

    pub fn generator(k: &Arc<NumberField>) -> NfElem {
        NfElem::new(k, RationalPoly::x())
    }

    pub fn from_rational(k: &Arc<NumberField>, r: BigRational) -> NfElem {
        NfElem::new(k, RationalPoly::constant(r))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.k
    }

    pub fn poly(&self) -> &RationalPoly {
        &self.c
    }

    /// Coordinates in the power basis, padded to the field degree.
    pub fn coords(&self) -> Vec<BigRational> {
        (0..self.k.degree()).map(|i| self.c.coeff(i)).collect()
    }

    pub fn is_rational(&self) -> bool {
        self.c.is_constant()
    }

    pub fn pow(&self, mut e: u64) -> NfElem {
        let mut acc = self.one_like();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }
}

impl Scalar for NfElem {
    fn zero_like(&self) -> Self {
        NfElem { k: self.k.clone(), c: RationalPoly::zero() }
    }
    fn one_like(&self) -> Self {
        NfElem { k: self.k.clone(), c: RationalPoly::one() }
    }
    fn from_rat(&self, r: &BigRational) -> Option<Self> {
        Some(NfElem { k: self.k.clone(), c: RationalPoly::constant(r.clone()) })
    }
    fn is_zero_elem(&self) -> bool {
        self.c.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        NfElem { k: self.k.clone(), c: self.c.add(&o.c) }
    }
    fn sub(&self, o: &Self) -> Self {
        NfElem { k: self.k.clone(), c: self.c.sub(&o.c) }
    }
    fn mul(&self, o: &Self) -> Self {
        NfElem::new(&self.k, self.c.mul(&o.c))
    }
    fn inv(&self) -> Option<Self> {
        if self.c.is_zero() {
            return None;
        }
        let (g, s, _) = self.c.ext_gcd(&self.k.poly);
        if g.deg() != 0 {
            return None;
        }
        Some(NfElem::new(&self.k, s))
    }
}

/// Solves sum_j x_j cols[j] = b over Q. Returns None if inconsistent.
pub fn solve_linear(cols: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = b.len();
    let n = cols.len();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut r: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=n {
                    let t = &f * &m[row][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn sqrt2_field() {
        let k = NumberField::new(RationalPoly::from_i64(&[-2, 0, 1]), "Q(sqrt2)");
        let a = NfElem::generator(&k);
        assert_eq!(a.mul(&a), NfElem::from_rational(&k, rat(2)));
        let b = a.add(&a.one_like());
        assert_eq!(b.mul(&b.inv().unwrap()), b.one_like());
    }

    #[test]
    fn linear_solve() {
        let cols = vec![vec![rat(1), rat(0), rat(1)], vec![rat(0), rat(1), rat(1)]];
        assert_eq!(solve_linear(&cols, &[rat(2), rat(3), rat(5)]), Some(vec![rat(2), rat(3)]));
        assert_eq!(solve_linear(&cols, &[rat(2), rat(3), rat(6)]), None);
    }
}
