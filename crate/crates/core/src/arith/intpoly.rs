//! Dense polynomials over Z, the working representation for heavy
//! computations over Q (division polynomials, norms, Hensel lifting).

use super::modpoly::ModPoly;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Minimum operand length for Kronecker-substitution multiplication.
const KRONECKER_THRESHOLD: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    c: Vec<BigInt>,
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.c.iter().map(|a| a.to_string()).collect())
    }
}

pub(crate) fn write_poly(f: &mut fmt::Formatter<'_>, coeffs: Vec<String>) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, a) in coeffs.iter().enumerate().rev() {
        if a == "0" {
            continue;
        }
        let (neg, mag) = match a.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, a.as_str()),
        };
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let mag = if mag.contains('/') && i > 0 {
            format!("({mag})")
        } else {
            mag.to_string()
        };
        match (i, mag.as_str()) {
            (0, _) => write!(f, "{mag}")?,
            (1, "1") => write!(f, "x")?,
            (1, _) => write!(f, "{mag}*x")?,
            (_, "1") => write!(f, "x^{i}")?,
            _ => write!(f, "{mag}*x^{i}")?,
        }
    }
    Ok(())
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|a| a.is_zero()) {
        v.pop();
    }
}

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        trim(&mut c);
        IntPoly { c }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        IntPoly::new(c.iter().map(|&a| BigInt::from(a)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::from_i64(&[1])
    }

    pub fn x() -> Self {
        IntPoly::from_i64(&[0, 1])
    }

    pub fn constant(a: BigInt) -> Self {
        IntPoly::new(vec![a])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.c
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.c.get(i).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn lead(&self) -> BigInt {
        self.c.last().cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.c.len().max(o.c.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        let n = self.c.len().max(o.c.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.c.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, a: &BigInt) -> IntPoly {
        IntPoly::new(self.c.iter().map(|b| b * a).collect())
    }

    pub fn shift(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![BigInt::zero(); k];
        c.extend(self.c.iter().cloned());
        IntPoly { c }
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        if self.c.len().min(o.c.len()) >= KRONECKER_THRESHOLD {
            return IntPoly::new(kronecker_mul(&self.c, &o.c));
        }
        IntPoly::new(schoolbook(&self.c, &o.c))
    }

    pub fn schoolbook_mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        IntPoly::new(schoolbook(&self.c, &o.c))
    }

    pub fn square(&self) -> IntPoly {
        self.mul(self)
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut r = IntPoly::one();
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.square();
            }
        }
        r
    }

    /// Nonnegative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for a in &self.c {
            g = g.gcd(a);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        IntPoly::new(self.c.iter().map(|a| a / &g).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.c
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, a| acc * x + a)
    }

    pub fn mod_p(&self, q: u64) -> ModPoly {
        ModPoly::from_bigints(q, &self.c)
    }

    /// Reduces every coefficient into the symmetric range modulo m.
    pub fn symmetric_mod(&self, m: &BigInt) -> IntPoly {
        let half = m >> 1;
        IntPoly::new(
            self.c
                .iter()
                .map(|a| {
                    let r = a.mod_floor(m);
                    if r > half {
                        r - m
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }

    pub fn mod_floor(&self, m: &BigInt) -> IntPoly {
        IntPoly::new(self.c.iter().map(|a| a.mod_floor(m)).collect())
    }

    /// Exact quotient over Z, or `None` when `d` does not divide `self` in Z[x].
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let dn = d.deg();
        if self.deg() < dn {
            return None;
        }
        let ld = d.lead();
        let mut r = self.c.clone();
        let mut quo = vec![BigInt::zero(); r.len() - dn];
        for i in (dn..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let (t, rem) = r[i].div_rem(&ld);
            if !rem.is_zero() {
                return None;
            }
            for j in 0..=dn {
                r[i - dn + j] -= &t * &d.c[j];
            }
            quo[i - dn] = t;
        }
        if r.iter().any(|a| !a.is_zero()) {
            return None;
        }
        Some(IntPoly::new(quo))
    }

    /// Division with remainder by a monic polynomial modulo m (coefficients in [0, m)).
    pub fn divrem_monic_mod(&self, d: &IntPoly, m: &BigInt) -> (IntPoly, IntPoly) {
        debug_assert!(d.lead().is_one());
        let dn = d.deg();
        let mut r: Vec<BigInt> = self.c.iter().map(|a| a.mod_floor(m)).collect();
        if r.len() <= dn {
            return (IntPoly::zero(), IntPoly::new(r));
        }
        let mut quo = vec![BigInt::zero(); r.len() - dn];
        for i in (dn..r.len()).rev() {
            let t = r[i].mod_floor(m);
            if t.is_zero() {
                continue;
            }
            for j in 0..=dn {
                r[i - dn + j] = (&r[i - dn + j] - &t * &d.c[j]).mod_floor(m);
            }
            quo[i - dn] = t;
        }
        r.truncate(dn);
        (IntPoly::new(quo), IntPoly::new(r))
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u64 {
        self.c.iter().map(|a| a.bits()).max().unwrap_or(0)
    }

    /// Maximum absolute coefficient.
    pub fn max_abs(&self) -> BigInt {
        self.c.iter().map(|a| a.abs()).max().unwrap_or_default()
    }

    /// Euclidean norm squared.
    pub fn norm2_sq(&self) -> BigInt {
        self.c.iter().map(|a| a * a).sum()
    }

    /// Coefficients reversed (x^deg f(1/x)).
    pub fn reverse(&self) -> IntPoly {
        IntPoly::new(self.c.iter().rev().cloned().collect())
    }

    /// f(-x).
    pub fn negate_var(&self) -> IntPoly {
        IntPoly::new(
            self.c
                .iter()
                .enumerate()
                .map(|(i, a)| if i % 2 == 1 { -a } else { a.clone() })
                .collect(),
        )
    }

    /// Composition f(a*x + b) for integers a, b.
    pub fn compose_affine(&self, a: &BigInt, b: &BigInt) -> IntPoly {
        let lin = IntPoly::new(vec![b.clone(), a.clone()]);
        let mut r = IntPoly::zero();
        for c in self.c.iter().rev() {
            r = r.mul(&lin).add(&IntPoly::constant(c.clone()));
        }
        r
    }
}

fn schoolbook(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Multiplication by packing coefficients into one big integer at 32-bit aligned slots.
fn kronecker_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let ba = a.iter().map(|x| x.bits()).max().unwrap_or(0);
    let bb = b.iter().map(|x| x.bits()).max().unwrap_or(0);
    let len_bits = 64 - (a.len().min(b.len()) as u64).leading_zeros() as u64;
    let need = ba + bb + len_bits + 2;
    let words = need.div_ceil(32) as usize;
    let pa = pack(a, words);
    let pb = pack(b, words);
    let prod = pa * pb;
    unpack(&prod, a.len() + b.len() - 1, words)
}

fn pack(c: &[BigInt], words: usize) -> BigInt {
    let mut pos = vec![0u32; c.len() * words];
    let mut neg = vec![0u32; c.len() * words];
    for (i, x) in c.iter().enumerate() {
        let (sign, digits) = x.to_u32_digits();
        let buf = if sign == Sign::Minus { &mut neg } else { &mut pos };
        buf[i * words..i * words + digits.len()].copy_from_slice(&digits);
    }
    BigInt::from_biguint(Sign::Plus, BigUint::new(pos))
        - BigInt::from_biguint(Sign::Plus, BigUint::new(neg))
}

fn unpack(v: &BigInt, n: usize, words: usize) -> Vec<BigInt> {
    // Add 2^(k-1) to every slot so all slot values become nonnegative.
    let mut off = vec![0u32; n * words];
    for i in 0..n {
        off[i * words + words - 1] = 1 << 31;
    }
    let offset = BigInt::from_biguint(Sign::Plus, BigUint::new(off));
    let u = (v + &offset).to_biguint().expect("offset makes value nonnegative");
    let digits = u.to_u32_digits();
    let half = BigInt::one() << (32 * words - 1);
    (0..n)
        .map(|i| {
            let lo = (i * words).min(digits.len());
            let hi = ((i + 1) * words).min(digits.len());
            let chunk = BigUint::new(digits[lo..hi].to_vec());
            BigInt::from_biguint(Sign::Plus, chunk) - &half
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_poly(rng: &mut ChaCha8Rng, len: usize, bits: u32) -> IntPoly {
        IntPoly::new(
            (0..len)
                .map(|_| {
                    let mut v = BigInt::from(rng.gen::<u64>());
                    for _ in 0..bits / 64 {
                        v = (v << 64) + rng.gen::<u64>();
                    }
                    if rng.gen_bool(0.5) {
                        -v
                    } else {
                        v
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn kronecker_matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let la = rng.gen_range(12..80);
            let lb = rng.gen_range(12..80);
            let bits = rng.gen_range(0..400);
            let a = random_poly(&mut rng, la, bits);
            let b = random_poly(&mut rng, lb, bits / 2);
            assert_eq!(a.mul(&b), a.schoolbook_mul(&b));
        }
    }

    #[test]
    fn exact_division() {
        let a = IntPoly::from_i64(&[-1, 0, 1]);
        let b = IntPoly::from_i64(&[1, 1]);
        assert_eq!(a.div_exact(&b), Some(IntPoly::from_i64(&[-1, 1])));
        assert_eq!(a.div_exact(&IntPoly::from_i64(&[1, 2])), None);
    }

    #[test]
    fn affine_composition() {
        let f = IntPoly::from_i64(&[1, 0, 1]);
        let g = f.compose_affine(&BigInt::from(2), &BigInt::from(3));
        assert_eq!(g, IntPoly::from_i64(&[10, 12, 4]));
    }
}
