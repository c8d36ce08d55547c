//! Small-integer number theory used throughout: primality, factorisation,
//! modular exponentiation and prime enumeration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd_i128(a as i128 % m as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorisation by trial division, ascending primes with exponents.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn valuation(mut n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let cur = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

/// Primes of a nonzero big integer that are below `limit`, plus the cofactor
/// flag: `true` when the integer was fully factored.
pub fn small_prime_divisors_big(n: &BigInt, limit: u64) -> (Vec<u64>, bool) {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return (out, false);
    }
    let mut p = 2u64;
    while p < limit {
        let pb = BigInt::from(p);
        if (&m % &pb).is_zero() {
            out.push(p);
            while (&m % &pb).is_zero() {
                m /= &pb;
            }
        }
        if m.is_one() {
            break;
        }
        if &pb * &pb > m {
            if let Some(r) = m.to_u64() {
                if r > 1 && r < limit {
                    out.push(r);
                    m = BigInt::one();
                }
            }
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (out, m.is_one())
}

/// Full factorisation of a big integer whose prime factors are all expected
/// to be small; returns `None` if a cofactor above `limit` remains.
pub fn factor_big_smooth(n: &BigInt, limit: u64) -> Option<Vec<u64>> {
    let (ps, full) = small_prime_divisors_big(n, limit);
    if full {
        Some(ps)
    } else {
        let mut m = n.abs();
        for &p in &ps {
            let pb = BigInt::from(p);
            while (&m % &pb).is_zero() {
                m /= &pb;
            }
        }
        let r = m.to_u64()?;
        if is_prime(r) {
            let mut ps = ps;
            ps.push(r);
            ps.sort_unstable();
            Some(ps)
        } else {
            None
        }
    }
}

/// Sieve of Eratosthenes up to and including `n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Iterator over primes starting at `start`, segmented so it can run to large bounds.
pub struct PrimeIter {
    base: u64,
    block: Vec<u64>,
    idx: usize,
    small: Vec<u64>,
}

const SEGMENT: u64 = 1 << 16;

impl PrimeIter {
    pub fn from(start: u64) -> Self {
        PrimeIter {
            base: start.max(2),
            block: Vec::new(),
            idx: 0,
            small: primes_up_to(1 << 16),
        }
    }

    fn refill(&mut self) {
        let lo = self.base;
        let hi = lo + SEGMENT;
        let mut composite = vec![false; SEGMENT as usize];
        for &p in &self.small {
            if p * p >= hi {
                break;
            }
            let mut m = (lo.div_ceil(p) * p).max(p * p);
            while m < hi {
                composite[(m - lo) as usize] = true;
                m += p;
            }
        }
        self.block = (0..SEGMENT)
            .filter(|&i| !composite[i as usize] && lo + i >= 2)
            .map(|i| lo + i)
            .collect();
        // The segment sieve only knows primes below 2^16, enough for bounds below 2^32.
        if hi > 1 << 32 {
            self.block.retain(|&n| is_prime(n));
        }
        self.idx = 0;
        self.base = hi;
    }
}

impl Iterator for PrimeIter {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        while self.idx >= self.block.len() {
            self.refill();
        }
        let p = self.block[self.idx];
        self.idx += 1;
        Some(p)
    }
}

/// A generator of the cyclic group (Z/p^k)^x for odd prime p.
pub fn primitive_root_prime_power(p: u64, k: u32) -> u64 {
    assert!(p > 2);
    let m = p.pow(k);
    let phi_fac = prime_divisors(p - 1);
    let mut g = 2;
    loop {
        let ok_mod_p = phi_fac.iter().all(|&r| pow_mod(g, (p - 1) / r, p) != 1);
        if ok_mod_p && (k == 1 || pow_mod(g, p - 1, p * p) != 1) {
            return g % m;
        }
        g += 1;
    }
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn mult_order(a: u64, m: u64) -> u64 {
    let phi = euler_phi(m);
    let mut ord = phi;
    for (p, _) in factorize(phi) {
        while ord.is_multiple_of(p) && pow_mod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Ceiling of the k-th root of a nonnegative big integer.
pub fn ceil_root(n: &BigInt, k: u32) -> BigInt {
    if n.is_zero() {
        return BigInt::zero();
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        r
    } else {
        r + 1
    }
}

/// Kronecker symbol (a/n) for odd positive n.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_up_to(10_000);
        let mr: Vec<u64> = (0..=10_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
    }

    #[test]
    fn prime_iter_crosses_segments() {
        let it: Vec<u64> = PrimeIter::from(65_500).take(20).collect();
        let naive: Vec<u64> = (65_500..).filter(|&n| is_prime(n)).take(20).collect();
        assert_eq!(it, naive);
    }

    #[test]
    fn phi_and_divisors() {
        assert_eq!(euler_phi(163), 162);
        assert_eq!(euler_phi(27), 18);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(valuation(162, 3), 4);
    }

    #[test]
    fn primitive_roots() {
        let g = primitive_root_prime_power(5, 2);
        assert_eq!(mult_order(g, 25), 20);
        let g = primitive_root_prime_power(3, 5);
        assert_eq!(mult_order(g, 243), 162);
    }

    #[test]
    fn jacobi_small() {
        assert_eq!(jacobi(-1, 7), -1);
        assert_eq!(jacobi(2, 7), 1);
        assert_eq!(jacobi(-7, 163), 1);
    }
}
