//! Dense polynomials over a prime field Z/q.
//!
//! The modulus is a prime below 2^63 so that products fit in `u128`.
//! Multiplication switches to Karatsuba above a configurable length, and
//! repeated reduction modulo a fixed polynomial goes through [`Reducer`],
//! which replaces long division by two multiplications with a precomputed
//! power-series inverse.

use super::primes::{inv_mod, mul_mod};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::fmt;

/// Default polynomial length above which multiplication uses Karatsuba.
pub const KARATSUBA_THRESHOLD: usize = 32;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModPoly {
    q: u64,
    c: Vec<u64>,
}

impl fmt::Debug for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModPoly(q={}, {:?})", self.q, self.c)
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{a}")?,
                1 if a == 1 => write!(f, "x")?,
                1 => write!(f, "{a}*x")?,
                _ if a == 1 => write!(f, "x^{i}")?,
                _ => write!(f, "{a}*x^{i}")?,
            }
        }
        write!(f, " (mod {})", self.q)
    }
}

#[inline]
fn add_m(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
fn sub_m(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl ModPoly {
    /// Builds a polynomial from residues (lowest degree first); entries are reduced mod q.
    pub fn new(q: u64, coeffs: Vec<u64>) -> Self {
        assert!((2..(1u64 << 63)).contains(&q), "modulus out of range");
        let mut c: Vec<u64> = coeffs.into_iter().map(|a| a % q).collect();
        trim(&mut c);
        ModPoly { q, c }
    }

    fn from_raw(q: u64, mut c: Vec<u64>) -> Self {
        trim(&mut c);
        ModPoly { q, c }
    }

    pub fn from_i64(q: u64, coeffs: &[i64]) -> Self {
        let c = coeffs
            .iter()
            .map(|&a| a.rem_euclid(q as i64) as u64)
            .collect();
        ModPoly::new(q, c)
    }

    pub fn from_bigints(q: u64, coeffs: &[BigInt]) -> Self {
        let qb = BigInt::from(q);
        let c = coeffs
            .iter()
            .map(|a| a.mod_floor(&qb).to_u64().unwrap())
            .collect();
        ModPoly::from_raw(q, c)
    }

    pub fn zero(q: u64) -> Self {
        ModPoly { q, c: Vec::new() }
    }

    pub fn constant(q: u64, a: u64) -> Self {
        ModPoly::new(q, vec![a])
    }

    pub fn one(q: u64) -> Self {
        ModPoly::constant(q, 1)
    }

    /// The monomial x.
    pub fn x(q: u64) -> Self {
        ModPoly { q, c: vec![0, 1] }
    }

    pub fn monomial(q: u64, a: u64, k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = a % q;
        ModPoly::from_raw(q, c)
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 1
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    fn check(&self, other: &ModPoly) -> Result<()> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q, other.q));
        }
        Ok(())
    }

    pub fn add(&self, o: &ModPoly) -> ModPoly {
        assert_eq!(self.q, o.q, "modulus mismatch");
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| add_m(self.coeff(i), o.coeff(i), self.q))
            .collect();
        ModPoly::from_raw(self.q, c)
    }

    pub fn sub(&self, o: &ModPoly) -> ModPoly {
        assert_eq!(self.q, o.q, "modulus mismatch");
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| sub_m(self.coeff(i), o.coeff(i), self.q))
            .collect();
        ModPoly::from_raw(self.q, c)
    }

    pub fn neg(&self) -> ModPoly {
        let c = self.c.iter().map(|&a| sub_m(0, a, self.q)).collect();
        ModPoly::from_raw(self.q, c)
    }

    pub fn scale(&self, a: u64) -> ModPoly {
        let a = a % self.q;
        let c = self.c.iter().map(|&b| mul_mod(a, b, self.q)).collect();
        ModPoly::from_raw(self.q, c)
    }

    /// Multiplication by x^k.
    pub fn shift(&self, k: usize) -> ModPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.c);
        ModPoly { q: self.q, c }
    }

    /// Checked product; fails on mismatched moduli.
    pub fn try_mul(&self, o: &ModPoly) -> Result<ModPoly> {
        self.check(o)?;
        Ok(self.mul(o))
    }

    pub fn mul(&self, o: &ModPoly) -> ModPoly {
        self.mul_with_threshold(o, KARATSUBA_THRESHOLD)
    }

    /// Product using schoolbook multiplication below `threshold` and Karatsuba above.
    pub fn mul_with_threshold(&self, o: &ModPoly, threshold: usize) -> ModPoly {
        assert_eq!(self.q, o.q, "modulus mismatch");
        if self.is_zero() || o.is_zero() {
            return ModPoly::zero(self.q);
        }
        let c = mul_slices(&self.c, &o.c, self.q, threshold.max(1));
        ModPoly::from_raw(self.q, c)
    }

    pub fn schoolbook_mul(&self, o: &ModPoly) -> ModPoly {
        self.mul_with_threshold(o, usize::MAX)
    }

    pub fn monic(&self) -> ModPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.q).expect("nonzero lead is invertible");
        self.scale(inv)
    }

    pub fn derivative(&self) -> ModPoly {
        let q = self.q;
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| mul_mod(a, i as u64 % q, q))
            .collect();
        ModPoly::from_raw(q, c)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let x = x % self.q;
        self.c
            .iter()
            .rev()
            .fold(0, |acc, &a| add_m(mul_mod(acc, x, self.q), a, self.q))
    }

    /// Quotient and remainder of long division.
    pub fn divrem(&self, d: &ModPoly) -> Result<(ModPoly, ModPoly)> {
        self.check(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let q = self.q;
        let dn = d.deg_or_zero();
        if self.c.len() <= dn {
            return Ok((ModPoly::zero(q), self.clone()));
        }
        let inv = inv_mod(d.lead(), q).unwrap();
        let mut r = self.c.clone();
        let mut quo = vec![0u64; r.len() - dn];
        for i in (dn..r.len()).rev() {
            let t = mul_mod(r[i], inv, q);
            if t == 0 {
                continue;
            }
            quo[i - dn] = t;
            for j in 0..=dn {
                r[i - dn + j] = sub_m(r[i - dn + j], mul_mod(t, d.c[j], q), q);
            }
        }
        r.truncate(dn);
        Ok((ModPoly::from_raw(q, quo), ModPoly::from_raw(q, r)))
    }

    pub fn rem(&self, d: &ModPoly) -> ModPoly {
        self.divrem(d).expect("valid divisor").1
    }

    pub fn div_exact(&self, d: &ModPoly) -> ModPoly {
        let (qq, r) = self.divrem(d).expect("valid divisor");
        debug_assert!(r.is_zero());
        qq
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &ModPoly) -> ModPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, t) with s*self + t*o = g and g monic.
    pub fn ext_gcd(&self, o: &ModPoly) -> (ModPoly, ModPoly, ModPoly) {
        let q = self.q;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (ModPoly::one(q), ModPoly::zero(q));
        let (mut t0, mut t1) = (ModPoly::zero(q), ModPoly::one(q));
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1).unwrap();
            let s = s0.sub(&qq.mul(&s1));
            let t = t0.sub(&qq.mul(&t1));
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
        let inv = inv_mod(r0.lead(), q).unwrap();
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    /// `self^e mod m` by square-and-multiply, reducing at every step.
    pub fn powmod(&self, e: &BigUint, m: &ModPoly) -> Result<ModPoly> {
        self.check(m)?;
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let red = Reducer::new(m);
        Ok(red.pow(&red.reduce(self), e))
    }

    pub fn powmod_u64(&self, e: u64, m: &ModPoly) -> Result<ModPoly> {
        self.powmod(&BigUint::from(e), m)
    }

    /// Number of distinct roots in Z/q, as deg gcd(f, x^q - x).
    pub fn count_roots(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.distinct_linear_part()?.deg_or_zero())
    }

    /// gcd(f, x^q - x): the product of the distinct linear factors of f.
    pub fn distinct_linear_part(&self) -> Result<ModPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let f = self.monic();
        if f.deg_or_zero() == 0 {
            return Ok(ModPoly::one(self.q));
        }
        let red = Reducer::new(&f);
        let xq = red.pow_x(&BigUint::from(self.q));
        Ok(f.gcd(&xq.sub(&ModPoly::x(self.q))))
    }

    /// Distinct roots in ascending order.
    pub fn roots(&self) -> Result<Vec<u64>> {
        let lin = self.distinct_linear_part()?;
        let mut out: Vec<u64> = if self.q < 2000 {
            (0..self.q).filter(|&a| lin.eval(a) == 0).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let facs = equal_degree_split(&lin, 1, &mut rng);
            facs.iter().map(|g| sub_m(0, g.c[0], self.q)).collect()
        };
        out.sort_unstable();
        Ok(out)
    }

    /// Complete factorisation over Z/q with the default seed.
    pub fn factor(&self) -> Result<FactorizationModQ> {
        self.factor_seeded(0)
    }

    /// Complete factorisation over Z/q; the equal-degree stage draws from a ChaCha
    /// generator seeded with `seed`.
    pub fn factor_seeded(&self, seed: u64) -> Result<FactorizationModQ> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.q == 2 {
            return Err(Error::Unsupported("factorisation modulo 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lead = self.lead();
        let mut factors = Vec::new();
        for (g, mult) in self.monic().squarefree_decomposition() {
            for (h, d) in g.distinct_degree() {
                for irr in equal_degree_split(&h, d, &mut rng) {
                    factors.push((irr, mult));
                }
            }
        }
        factors.sort_by(|a, b| cmp_poly(&a.0, &b.0).then(a.1.cmp(&b.1)));
        Ok(FactorizationModQ {
            q: self.q,
            lead,
            factors,
        })
    }

    /// Squarefree decomposition of a monic polynomial: pairs (g, i) with g squarefree,
    /// pairwise coprime, and f = prod g^i.
    pub fn squarefree_decomposition(&self) -> Vec<(ModPoly, u32)> {
        let f = self.monic();
        let q = self.q;
        let mut out = Vec::new();
        if f.deg_or_zero() == 0 {
            return out;
        }
        let c = f.gcd(&f.derivative());
        let mut w = f.div_exact(&c);
        let mut c = c;
        let mut i = 1u32;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.div_exact(&y);
            if fac.deg_or_zero() > 0 {
                out.push((fac, i));
            }
            w = y;
            c = c.div_exact(&w);
            i += 1;
        }
        if c.deg_or_zero() > 0 {
            // c is a polynomial in x^q; take its q-th root.
            let qs = q as usize;
            let root = ModPoly::from_raw(q, c.c.iter().step_by(qs).copied().collect());
            for (g, m) in root.squarefree_decomposition() {
                out.push((g, m * q as u32));
            }
        }
        out
    }

    /// Distinct-degree factorisation of a monic squarefree polynomial.
    pub fn distinct_degree(&self) -> Vec<(ModPoly, usize)> {
        let q = self.q;
        let mut f = self.monic();
        let mut out = Vec::new();
        let mut h = ModPoly::x(q);
        let mut d = 0;
        let qb = BigUint::from(q);
        while f.deg_or_zero() >= 2 * (d + 1) {
            d += 1;
            let red = Reducer::new(&f);
            h = red.pow(&red.reduce(&h), &qb);
            let g = f.gcd(&h.sub(&ModPoly::x(q)));
            if g.deg_or_zero() > 0 {
                f = f.div_exact(&g);
                h = h.rem(&f);
                out.push((g, d));
            }
        }
        if f.deg_or_zero() > 0 {
            let n = f.deg_or_zero();
            out.push((f, n));
        }
        out
    }
}

/// Deterministic ordering: by degree, then lexicographic on coefficients (lowest first).
pub fn cmp_poly(a: &ModPoly, b: &ModPoly) -> Ordering {
    a.c.len().cmp(&b.c.len()).then_with(|| a.c.cmp(&b.c))
}

/// Cantor-Zassenhaus equal-degree splitting of a monic squarefree product of
/// irreducibles of degree `d`. Requires odd q.
fn equal_degree_split(f: &ModPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
    let q = f.q;
    let n = f.deg_or_zero();
    if n == 0 {
        return Vec::new();
    }
    if n == d {
        return vec![f.clone()];
    }
    let e = (BigUint::from(q).pow(d as u32) - BigUint::one()) >> 1;
    let red = Reducer::new(f);
    loop {
        let a = ModPoly::from_raw(q, (0..n).map(|_| rng.gen_range(0..q)).collect());
        if a.deg_or_zero() == 0 {
            continue;
        }
        let g0 = f.gcd(&a);
        let g = if g0.deg_or_zero() > 0 {
            g0
        } else {
            let b = red.pow(&a, &e).sub(&ModPoly::one(q));
            f.gcd(&b)
        };
        let k = g.deg_or_zero();
        if k > 0 && k < n {
            let mut out = equal_degree_split(&g, d, rng);
            out.extend(equal_degree_split(&f.div_exact(&g), d, rng));
            return out;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationModQ {
    pub q: u64,
    /// Leading coefficient of the input.
    pub lead: u64,
    /// Monic irreducible factors with multiplicities, in canonical order.
    pub factors: Vec<(ModPoly, u32)>,
}

impl FactorizationModQ {
    pub fn product(&self) -> ModPoly {
        let mut p = ModPoly::constant(self.q, self.lead);
        for (g, m) in &self.factors {
            for _ in 0..*m {
                p = p.mul(g);
            }
        }
        p
    }

    /// Sorted list of irreducible factor degrees, with repetition by multiplicity.
    pub fn degree_pattern(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(g, m)| std::iter::repeat_n(g.deg_or_zero(), *m as usize))
            .collect();
        v.sort_unstable();
        v
    }
}

/// Fast repeated reduction modulo a fixed monic polynomial.
pub struct Reducer {
    f: ModPoly,
    n: usize,
    /// Inverse of the reversal of f modulo x^(n-1).
    inv_rev: Vec<u64>,
}

impl Reducer {
    pub fn new(m: &ModPoly) -> Self {
        let f = m.monic();
        let n = f.deg_or_zero();
        let rev: Vec<u64> = f.c.iter().rev().copied().collect();
        let inv_rev = if n >= 2 {
            series_inverse(&rev, n - 1, f.q)
        } else {
            vec![1]
        };
        Reducer { f, n, inv_rev }
    }

    pub fn modulus(&self) -> &ModPoly {
        &self.f
    }

    /// Reduction of an arbitrary polynomial (falls back to long division for long inputs).
    pub fn reduce(&self, a: &ModPoly) -> ModPoly {
        if self.n == 0 {
            return ModPoly::zero(a.q);
        }
        if a.c.len() <= self.n {
            return a.clone();
        }
        if a.c.len() > 2 * self.n - 1 || self.n < 64 {
            return a.rem(&self.f);
        }
        let q = a.q;
        let d = a.c.len() - 1;
        let k = d - self.n + 1;
        let rev_a: Vec<u64> = a.c.iter().rev().take(k).copied().collect();
        let prod = mul_slices(&rev_a, &self.inv_rev[..k.min(self.inv_rev.len())], q, KARATSUBA_THRESHOLD);
        let mut quo: Vec<u64> = prod.into_iter().take(k).collect();
        quo.resize(k, 0);
        quo.reverse();
        let qf = mul_slices(&quo, &self.f.c, q, KARATSUBA_THRESHOLD);
        let r: Vec<u64> = (0..self.n)
            .map(|i| sub_m(a.c[i], qf.get(i).copied().unwrap_or(0), q))
            .collect();
        ModPoly::from_raw(q, r)
    }

    pub fn mul(&self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        self.reduce(&a.mul(b))
    }

    /// `a^e mod f` for `a` already reduced.
    pub fn pow(&self, a: &ModPoly, e: &BigUint) -> ModPoly {
        let q = self.f.q;
        if self.n == 0 {
            return ModPoly::zero(q);
        }
        let mut r = self.reduce(&ModPoly::one(q));
        let bits = e.bits();
        for i in (0..bits).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    /// `x^e mod f`, where multiplication by x is a shift plus one correction.
    pub fn pow_x(&self, e: &BigUint) -> ModPoly {
        let q = self.f.q;
        if self.n == 0 {
            return ModPoly::zero(q);
        }
        if self.n == 1 {
            // f = x - a, so x ≡ a.
            let a = sub_m(0, self.f.c[0], q);
            let mut r = 1u64;
            let bits = e.bits();
            for i in (0..bits).rev() {
                r = mul_mod(r, r, q);
                if e.bit(i) {
                    r = mul_mod(r, a, q);
                }
            }
            return ModPoly::constant(q, r);
        }
        let mut r = ModPoly::one(q);
        let bits = e.bits();
        for i in (0..bits).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul_x(&r);
            }
        }
        r
    }

    fn mul_x(&self, a: &ModPoly) -> ModPoly {
        let q = self.f.q;
        let mut c = vec![0u64; self.n + 1];
        c[1..=a.c.len()].copy_from_slice(&a.c);
        let t = c[self.n];
        if t != 0 {
            for j in 0..self.n {
                c[j] = sub_m(c[j], mul_mod(t, self.f.c[j], q), q);
            }
        }
        c.truncate(self.n);
        ModPoly::from_raw(q, c)
    }
}

/// Power series inverse of `h` modulo x^k (h[0] != 0), by Newton iteration.
fn series_inverse(h: &[u64], k: usize, q: u64) -> Vec<u64> {
    let mut g = vec![inv_mod(h[0], q).expect("unit constant term")];
    let mut prec = 1;
    while prec < k {
        prec = (2 * prec).min(k);
        let hh = &h[..prec.min(h.len())];
        let mut e = mul_slices(hh, &g, q, KARATSUBA_THRESHOLD);
        e.resize(prec, 0);
        // e = 2 - h g
        for v in e.iter_mut() {
            *v = sub_m(0, *v, q);
        }
        e[0] = add_m(e[0], 2, q);
        let mut ng = mul_slices(&g, &e, q, KARATSUBA_THRESHOLD);
        ng.resize(prec, 0);
        g = ng;
    }
    g.truncate(k);
    g
}

/// Full product of coefficient slices (lowest first), length la + lb - 1.
fn mul_slices(a: &[u64], b: &[u64], q: u64, thr: usize) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if a.len() <= thr {
        return schoolbook(a, b, q);
    }
    let la = a.len();
    let lb = b.len();
    let mut out = vec![0u64; la + lb - 1];
    if 2 * la <= lb {
        // Unbalanced: cut the long operand into chunks of the short length.
        let mut start = 0;
        while start < lb {
            let end = (start + la).min(lb);
            let part = mul_slices(a, &b[start..end], q, thr);
            for (i, v) in part.into_iter().enumerate() {
                out[start + i] = add_m(out[start + i], v, q);
            }
            start = end;
        }
        return out;
    }
    let m = lb / 2;
    let (a0, a1) = a.split_at(m.min(la));
    let (b0, b1) = b.split_at(m);
    let z0 = mul_slices(a0, b0, q, thr);
    let z2 = mul_slices(a1, b1, q, thr);
    let sa = add_slices(a0, a1, q);
    let sb = add_slices(b0, b1, q);
    let mut z1 = mul_slices(&sa, &sb, q, thr);
    for (i, v) in z0.iter().enumerate() {
        z1[i] = sub_m(z1[i], *v, q);
    }
    for (i, v) in z2.iter().enumerate() {
        z1[i] = sub_m(z1[i], *v, q);
    }
    for (i, v) in z0.into_iter().enumerate() {
        out[i] = add_m(out[i], v, q);
    }
    for (i, v) in z1.into_iter().enumerate() {
        if m + i < out.len() {
            out[m + i] = add_m(out[m + i], v, q);
        } else {
            debug_assert_eq!(v, 0);
        }
    }
    for (i, v) in z2.into_iter().enumerate() {
        out[2 * m + i] = add_m(out[2 * m + i], v, q);
    }
    out
}

fn add_slices(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| add_m(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), q))
        .collect()
}

fn schoolbook(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len() + b.len() - 1;
    if q < (1u64 << 32) {
        // Products fit in 64 bits, so a u128 accumulator never overflows here.
        let mut acc = vec![0u128; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as u128;
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] += x * y as u128;
            }
        }
        acc.into_iter().map(|v| (v % q as u128) as u64).collect()
    } else {
        let mut out = vec![0u64; n];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = add_m(out[i + j], mul_mod(x, y, q), q);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_roots(f: &ModPoly) -> usize {
        (0..f.q).filter(|&a| f.eval(a) == 0).count()
    }

    #[test]
    fn mul_small_example() {
        let a = ModPoly::from_i64(5, &[3, 0, 2]);
        let b = ModPoly::from_i64(5, &[4, 1]);
        assert_eq!(a.mul(&b), ModPoly::from_i64(5, &[2, 3, 3, 2]));
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &q in &[97u64, 1_000_003, (1u64 << 61) - 1] {
            for _ in 0..10 {
                let la = rng.gen_range(1..300);
                let lb = rng.gen_range(1..300);
                let a = ModPoly::new(q, (0..la).map(|_| rng.gen_range(0..q)).collect());
                let b = ModPoly::new(q, (0..lb).map(|_| rng.gen_range(0..q)).collect());
                assert_eq!(a.mul_with_threshold(&b, 4), a.schoolbook_mul(&b));
            }
        }
    }

    #[test]
    fn reducer_matches_long_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = 10007;
        for n in [70usize, 150, 301] {
            let f = ModPoly::new(q, (0..=n).map(|_| rng.gen_range(1..q)).collect());
            let red = Reducer::new(&f);
            let a = ModPoly::new(q, (0..2 * n - 1).map(|_| rng.gen_range(0..q)).collect());
            assert_eq!(red.reduce(&a), a.rem(&f.monic()));
        }
    }

    #[test]
    fn powmod_examples() {
        let m = ModPoly::from_i64(7, &[1, 0, 1]);
        let x = ModPoly::x(7);
        assert_eq!(x.powmod_u64(1, &m).unwrap(), x);
        assert_eq!(x.powmod_u64(4, &m).unwrap(), ModPoly::one(7));
    }

    #[test]
    fn count_roots_examples() {
        assert_eq!(ModPoly::from_i64(7, &[-1, 0, 1]).count_roots().unwrap(), 2);
        assert_eq!(ModPoly::from_i64(7, &[1, 0, 1]).count_roots().unwrap(), 0);
        assert_eq!(ModPoly::from_i64(5, &[0, -1, 0, 1]).count_roots().unwrap(), 3);
    }

    #[test]
    fn count_roots_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [3u64, 5, 7, 11, 13, 101, 199] {
            for _ in 0..20 {
                let n = rng.gen_range(1..12);
                let f = ModPoly::new(q, (0..=n).map(|_| rng.gen_range(0..q)).collect());
                if f.is_zero() {
                    continue;
                }
                assert_eq!(f.count_roots().unwrap(), brute_roots(&f), "{f}");
            }
        }
    }

    #[test]
    fn factor_examples() {
        let f = ModPoly::from_i64(7, &[-1, 0, 1]).factor().unwrap();
        let got: Vec<Vec<u64>> = f.factors.iter().map(|(g, _)| g.coeffs().to_vec()).collect();
        assert_eq!(got, vec![vec![1, 1], vec![6, 1]]);
        let f = ModPoly::from_i64(3, &[1, 0, 0, 0, 1]).factor().unwrap();
        assert_eq!(f.degree_pattern(), vec![2, 2]);
        let f = ModPoly::from_i64(11, &[1, 1, 1, 1, 1]).factor().unwrap();
        assert_eq!(f.degree_pattern(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn factor_rejects_two() {
        assert!(ModPoly::from_i64(2, &[1, 1]).factor().is_err());
    }

    #[test]
    fn factor_round_trip_with_multiplicities() {
        let q = 5;
        let a = ModPoly::from_i64(q, &[1, 1]);
        let b = ModPoly::from_i64(q, &[2, 0, 1]);
        let f = a.mul(&a).mul(&a).mul(&a).mul(&a).mul(&b).mul(&b).scale(3);
        let fac = f.factor().unwrap();
        assert_eq!(fac.product(), f);
        assert!(fac.factors.iter().any(|(g, m)| g == &a && *m == 5));
    }
}
