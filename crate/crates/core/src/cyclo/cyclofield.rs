//! Cyclotomic polynomials and the fields Q(zeta_m).

use super::numfield::{NfElem, NumberField};
use crate::arith::primes::{divisors, factorize, gcd_u64};
use crate::arith::{IntPoly, RationalPoly, Scalar};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::sync::Arc;

/// Phi_m over Z. Prime powers use Phi_{p^k}(x) = Phi_p(x^{p^(k-1)}); other m divide
/// x^m - 1 by Phi_d for the proper divisors d.
pub fn cyclotomic_poly(m: u64) -> IntPoly {
    assert!(m >= 1);
    if m == 1 {
        return IntPoly::from_i64(&[-1, 1]);
    }
    let f = factorize(m);
    if f.len() == 1 {
        let (p, k) = f[0];
        let step = p.pow(k - 1) as usize;
        let mut c = vec![BigInt::zero(); step * (p as usize - 1) + 1];
        for i in 0..p as usize {
            c[i * step] = BigInt::from(1);
        }
        return IntPoly::new(c);
    }
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::from(1);
    let mut acc = IntPoly::new(num);
    for d in divisors(m) {
        if d < m {
            acc = acc.div_exact(&cyclotomic_poly(d)).expect("Phi_d divides x^m - 1");
        }
    }
    acc
}

/// Q(zeta_m) with a table of the reduced powers zeta^j, 0 <= j < m.
#[derive(Debug)]
pub struct CycloField {
    m: u64,
    nf: Arc<NumberField>,
    powers: Vec<Vec<BigRational>>,
}

impl CycloField {
    pub fn new(m: u64) -> Arc<CycloField> {
        let phi = RationalPoly::from_int_poly(&cyclotomic_poly(m));
        let nf = NumberField::new(phi, format!("Q(zeta_{m})"));
        let z = NfElem::generator(&nf);
        let mut powers = Vec::with_capacity(m as usize);
        let mut cur = z.one_like();
        for _ in 0..m {
            powers.push(cur.coords());
            cur = cur.mul(&z);
        }
        Arc::new(CycloField { m, nf, powers })
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.nf.degree()
    }

    pub fn number_field(&self) -> &Arc<NumberField> {
        &self.nf
    }

    pub fn zeta(&self) -> NfElem {
        self.zeta_pow(1)
    }

    /// zeta^k for any integer k.
    pub fn zeta_pow(&self, k: i64) -> NfElem {
        let j = k.rem_euclid(self.m as i64) as usize;
        self.from_coords(self.powers[j].clone())
    }

    pub fn from_coords(&self, c: Vec<BigRational>) -> NfElem {
        NfElem::new(&self.nf, RationalPoly::new(c))
    }

    pub fn element(&self, p: &RationalPoly) -> NfElem {
        NfElem::new(&self.nf, p.clone())
    }

    /// Linear combination sum_j a_j zeta^(e_j).
    pub fn combination(&self, terms: impl IntoIterator<Item = (BigRational, u64)>) -> NfElem {
        let mut acc = vec![BigRational::zero(); self.degree()];
        for (a, e) in terms {
            if a.is_zero() {
                continue;
            }
            for (o, v) in acc.iter_mut().zip(&self.powers[(e % self.m) as usize]) {
                if !v.is_zero() {
                    *o += &a * v;
                }
            }
        }
        self.from_coords(acc)
    }

    /// sigma_c: zeta -> zeta^c.
    pub fn automorphism(&self, c: i64, a: &NfElem) -> Result<NfElem> {
        let cm = c.rem_euclid(self.m as i64) as u64;
        if gcd_u64(cm, self.m) != 1 {
            return Err(Error::InvalidInput(format!("{c} is not a unit mod {}", self.m)));
        }
        let terms = a
            .poly()
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), (i as u64 * cm) % self.m))
            .collect::<Vec<_>>();
        Ok(self.combination(terms))
    }

    /// Image of an element of Q(zeta_d), d | m, under zeta_d -> zeta_m^(m/d).
    pub fn embed_from(&self, src: &CycloField, a: &NfElem) -> Result<NfElem> {
        if !self.m.is_multiple_of(src.m) {
            return Err(Error::InvalidInput(format!("Q(zeta_{}) is not inside Q(zeta_{})", src.m, self.m)));
        }
        let step = self.m / src.m;
        let terms = a.poly().coeffs().iter().enumerate().map(|(i, v)| (v.clone(), i as u64 * step)).collect::<Vec<_>>();
        Ok(self.combination(terms))
    }

    /// Units of Z/m.
    pub fn units(&self) -> Vec<u64> {
        units_mod(self.m)
    }
}

pub fn units_mod(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|&c| gcd_u64(c, m) == 1).collect()
}
