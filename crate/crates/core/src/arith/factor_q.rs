//! Factorisation over Q: squarefree decomposition, a good prime chosen by
//! degree-pattern analysis, multifactor Hensel lifting and Zassenhaus
//! recombination.
//!
//! With a degree cap only factors of degree at most the cap are split off.
//! Modular factors above the cap are lifted as one lump and never enter
//! recombination; whatever is left over is reported as a residual that
//! provably has no factor of degree at most the cap.

use super::intpoly::IntPoly;
use super::modpoly::ModPoly;
use super::primes::{ceil_root, is_prime};
use super::ratpoly::RationalPoly;
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct FactorConfig {
    /// Only factors of degree at most this are required.
    pub degree_cap: Option<usize>,
    /// Wall-clock deadline; exceeding it yields `Error::Indeterminate`.
    pub deadline: Option<Instant>,
    /// Maximum number of recombination candidates tried.
    pub max_subsets: u64,
    /// Number of good primes examined for degree patterns.
    pub pattern_primes: usize,
    pub seed: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            degree_cap: None,
            deadline: None,
            max_subsets: 2_000_000,
            pattern_primes: 7,
            seed: 0,
        }
    }
}

impl FactorConfig {
    pub fn with_cap(cap: usize) -> Self {
        FactorConfig {
            degree_cap: Some(cap),
            ..Default::default()
        }
    }

    pub fn check_deadline(&self) -> Result<()> {
        if let Some(d) = self.deadline {
            if Instant::now() > d {
                return Err(Error::Indeterminate("factorisation time budget exceeded".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationQ {
    pub content: BigRational,
    /// Irreducible primitive integral factors (positive leading coefficient) with multiplicity.
    pub factors: Vec<(RationalPoly, u32)>,
    /// Cofactors left unfactored under a degree cap; each has no factor of degree at most the cap.
    pub residual: Vec<(RationalPoly, u32)>,
}

impl FactorizationQ {
    pub fn product(&self) -> RationalPoly {
        let mut p = RationalPoly::constant(self.content.clone());
        for (g, m) in self.factors.iter().chain(self.residual.iter()) {
            for _ in 0..*m {
                p = p.mul(g);
            }
        }
        p
    }

    /// Degrees of the irreducible factors, sorted, with multiplicity.
    pub fn degrees(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(g, m)| std::iter::repeat_n(g.deg(), *m as usize))
            .collect();
        v.sort_unstable();
        v
    }

    pub fn is_complete(&self) -> bool {
        self.residual.is_empty()
    }
}

/// Factors f over Q. Output factors are sorted by degree then coefficients.
pub fn factor_over_q(f: &RationalPoly, cfg: &FactorConfig) -> Result<FactorizationQ> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (content, prim) = f.to_int_parts();
    let mut factors = Vec::new();
    let mut residual = Vec::new();
    if prim.deg() == 0 {
        return Ok(FactorizationQ {
            content,
            factors,
            residual,
        });
    }
    for (g, mult) in squarefree_decomposition(&prim) {
        cfg.check_deadline()?;
        let (irr, res) = factor_squarefree(&g, cfg)?;
        factors.extend(irr.into_iter().map(|h| (RationalPoly::from_int_poly(&h), mult)));
        residual.extend(res.into_iter().map(|h| (RationalPoly::from_int_poly(&h), mult)));
    }
    let key = |p: &(RationalPoly, u32)| (p.0.deg(), format!("{:?}", p.0.coeffs()), p.1);
    factors.sort_by_key(key);
    residual.sort_by_key(key);
    Ok(FactorizationQ {
        content,
        factors,
        residual,
    })
}

/// Squarefree decomposition of a primitive integral polynomial (Yun), as primitive parts.
pub fn squarefree_decomposition(f: &IntPoly) -> Vec<(IntPoly, u32)> {
    if f.deg() == 0 {
        return Vec::new();
    }
    if is_squarefree(f) {
        return vec![(f.primitive_part(), 1)];
    }
    let fr = RationalPoly::from_int_poly(f);
    let d = fr.derivative();
    let mut a = fr.gcd(&d);
    let mut b = fr.divrem(&a).0;
    let mut c = d.divrem(&a).0;
    let mut dd = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        a = b.gcd(&dd);
        if a.deg() > 0 {
            out.push((a.to_int_parts().1, i));
        }
        b = b.divrem(&a).0;
        if b.deg() == 0 {
            break;
        }
        c = dd.divrem(&a).0;
        dd = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Proves squarefreeness modularly when possible, else decides exactly over Q.
pub fn is_squarefree(f: &IntPoly) -> bool {
    if f.deg() <= 1 {
        return true;
    }
    if modular_squarefree_witness(f, 12).is_some() {
        return true;
    }
    let fr = RationalPoly::from_int_poly(f);
    fr.gcd(&fr.derivative()).deg() == 0
}

/// A prime q not dividing lc(f) with f mod q squarefree, which proves f squarefree over Q.
pub fn modular_squarefree_witness(f: &IntPoly, tries: usize) -> Option<u64> {
    let lc = f.lead();
    let mut q = 1_000_003u64;
    let mut tried = 0;
    while tried < tries {
        q += 2;
        if !is_prime(q) {
            continue;
        }
        if (&lc % BigInt::from(q)).is_zero() {
            continue;
        }
        tried += 1;
        let fm = f.mod_p(q);
        if fm.gcd(&fm.derivative()).degree() == Some(0) {
            return Some(q);
        }
    }
    None
}

struct PrimeData {
    p: u64,
    /// Irreducible monic factors of degree at most the cap.
    small: Vec<ModPoly>,
    /// Product of the remaining (larger) irreducible factors, monic; one if none.
    lump: ModPoly,
}

/// Factors a squarefree primitive polynomial with positive leading coefficient.
/// Returns (irreducible factors, residual cofactors).
fn factor_squarefree(g: &IntPoly, cfg: &FactorConfig) -> Result<(Vec<IntPoly>, Vec<IntPoly>)> {
    let g = g.primitive_part();
    let n = g.deg();
    if n == 1 {
        return Ok((vec![g], vec![]));
    }
    let cap = cfg.degree_cap.unwrap_or(n).min(n);
    let capped = cap < n;
    if cap == 0 {
        return Ok((vec![], vec![g]));
    }

    // Degree patterns at several good primes.
    let mut allowed: Vec<bool> = vec![true; cap + 1];
    let mut best: Option<(usize, PrimeData)> = None;
    let lc = g.lead();
    let deriv = g.derivative();
    let mut examined = 0;
    let mut p = 2u64;
    let mut rounds = 0;
    while examined < cfg.pattern_primes && rounds < 2000 {
        rounds += 1;
        p += 1;
        while !is_prime(p) {
            p += 1;
        }
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let gm = g.mod_p(p).monic();
        if gm.gcd(&deriv.mod_p(p)).degree() != Some(0) {
            continue;
        }
        cfg.check_deadline()?;
        examined += 1;
        let (small_parts, lump) = partial_ddf(&gm, cap);
        let mut sums = vec![false; cap + 1];
        sums[0] = true;
        let mut count = 0;
        for (h, d) in &small_parts {
            let k = h.degree().unwrap() / d;
            for _ in 0..k {
                count += 1;
                for s in (*d..=cap).rev() {
                    if sums[s - d] {
                        sums[s] = true;
                    }
                }
            }
        }
        for (a, s) in allowed.iter_mut().zip(sums.iter()) {
            *a = *a && *s;
        }
        let better = match &best {
            None => true,
            Some((c, _)) => count < *c,
        };
        if better {
            let mut small = Vec::new();
            for (h, d) in small_parts {
                small.extend(split_equal_degree(&h, d, cfg.seed));
            }
            best = Some((count, PrimeData { p, small, lump }));
        }
        // A proper factor must have a degree allowed at every prime.
        if !(1..=cap).any(|d| allowed[d] && d < n) {
            break;
        }
    }
    let Some((_, data)) = best else {
        return Err(Error::Indeterminate("no good reduction prime found".into()));
    };
    if !(1..=cap).any(|d| allowed[d] && d < n) {
        return Ok(if capped { (vec![], vec![g]) } else { (vec![g], vec![]) });
    }

    // Coefficient bound for lc(g) * (monic factor of degree <= dmax).
    let dmax = if capped { cap } else { n - 1 };
    let bound = factor_coefficient_bound(&g, dmax);
    let mut modulus = BigInt::from(data.p);
    let target = &bound * 2 + 1;
    while modulus <= target {
        modulus = &modulus * &modulus;
    }

    let mut mod_factors = data.small.clone();
    let has_lump = data.lump.degree().unwrap_or(0) > 0;
    if has_lump {
        mod_factors.push(data.lump.clone());
    }
    cfg.check_deadline()?;
    let lifted = hensel_lift(&g, &mod_factors, data.p, &modulus);
    let mut us = lifted;
    if has_lump {
        us.pop();
    }

    // Zassenhaus recombination over the small lifted factors.
    let mut rest = g.clone();
    let mut found = Vec::new();
    let mut tried: u64 = 0;
    let mut s = 1;
    loop {
        let r = us.len();
        let max_size = if capped || has_lump { r } else { r / 2 };
        if s > max_size {
            break;
        }
        let mut hit = None;
        let degs: Vec<usize> = us.iter().map(|u| u.deg()).collect();
        let mut combo: Vec<usize> = (0..s).collect();
        loop {
            let dsum: usize = combo.iter().map(|&i| degs[i]).sum();
            if dsum <= cap && dsum < rest.deg() && allowed[dsum] {
                tried += 1;
                if tried > cfg.max_subsets {
                    return Err(Error::Indeterminate("recombination budget exceeded".into()));
                }
                if tried.is_multiple_of(256) {
                    cfg.check_deadline()?;
                }
                if let Some(h) = try_candidate(&rest, &us, &combo, &modulus) {
                    hit = Some((combo.clone(), h));
                    break;
                }
            }
            if !next_combination(&mut combo, r) {
                break;
            }
        }
        match hit {
            Some((combo, h)) => {
                rest = rest.div_exact(&h).expect("verified divisor");
                found.push(h);
                for &i in combo.iter().rev() {
                    us.remove(i);
                }
            }
            None => s += 1,
        }
    }
    let mut residual = Vec::new();
    if rest.deg() > 0 {
        if !has_lump && (rest.deg() <= cap || !capped) {
            found.push(rest.primitive_part());
        } else {
            residual.push(rest.primitive_part());
        }
    }
    Ok((found, residual))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn try_candidate(rest: &IntPoly, us: &[IntPoly], combo: &[usize], m: &BigInt) -> Option<IntPoly> {
    let lc = rest.lead();
    // Trailing-coefficient test first: cheap necessary condition.
    let c0 = rest.coeff(0);
    if !c0.is_zero() {
        let mut t = lc.clone();
        for &i in combo {
            t = (t * us[i].coeff(0)).mod_floor(m);
        }
        let t = symmetric(&t, m);
        if t.is_zero() || !(&lc * &c0 % &t).is_zero() {
            return None;
        }
    }
    let mut cand = IntPoly::constant(lc);
    for &i in combo {
        cand = cand.mul(&us[i]).mod_floor(m);
    }
    let cand = cand.symmetric_mod(m).primitive_part();
    if cand.deg() == 0 {
        return None;
    }
    rest.div_exact(&cand).map(|_| cand)
}

fn symmetric(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a.mod_floor(m);
    if r > (m >> 1) {
        r - m
    } else {
        r
    }
}

/// Distinct-degree factorisation stopped at degree `cap`: returns the
/// equal-degree products with degree at most cap and the product of everything else.
fn partial_ddf(f: &ModPoly, cap: usize) -> (Vec<(ModPoly, usize)>, ModPoly) {
    let q = f.modulus();
    let mut f = f.clone();
    let mut out = Vec::new();
    let mut h = ModPoly::x(q);
    let qb = BigUint::from(q);
    let mut d = 0;
    while d < cap && f.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        let red = super::modpoly::Reducer::new(&f);
        h = red.pow(&red.reduce(&h), &qb);
        let g = f.gcd(&h.sub(&ModPoly::x(q)));
        if g.degree().unwrap_or(0) > 0 {
            f = f.div_exact(&g);
            h = h.rem(&f);
            out.push((g, d));
        }
    }
    let fd = f.degree().unwrap_or(0);
    if fd > 0 && (f.degree().unwrap_or(0) < 2 * (d + 1)) && fd <= cap {
        // Whatever remains is irreducible once no factor of degree <= d exists
        // and its degree is below 2(d+1).
        out.push((f.clone(), fd));
        return (out, ModPoly::one(q));
    }
    (out, f)
}

fn split_equal_degree(h: &ModPoly, d: usize, seed: u64) -> Vec<ModPoly> {
    if h.degree() == Some(d) {
        return vec![h.clone()];
    }
    // The complete factorisation of an equal-degree product consists of its degree-d parts.
    let fac = h.factor_seeded(seed).expect("odd prime");
    fac.factors.into_iter().map(|(g, _)| g).collect()
}

/// Bound on the coefficients of lc(g) * m where m is a monic factor of g of degree <= dmax.
pub fn factor_coefficient_bound(g: &IntPoly, dmax: usize) -> BigInt {
    let n = g.deg();
    let lc = g.lead().abs();
    // Fujiwara root bound, rounded up to an integer.
    let mut r = BigInt::one();
    for i in 1..=n {
        let a = g.coeff(n - i).abs();
        if a.is_zero() {
            continue;
        }
        let denom = if i == n { &lc * 2 } else { lc.clone() };
        let q = a.div_ceil(&denom);
        let root = ceil_root(&q, i as u32);
        if root > r {
            r = root;
        }
    }
    let r: BigInt = r * 2;
    let root_based = (0..=dmax)
        .map(|i| binomial(BigInt::from(dmax), BigInt::from(i)) * num_traits::pow(r.clone(), dmax - i))
        .max()
        .unwrap()
        * &lc;
    // Mahler measure bound: |coeff_i| <= binom(d, i) * ||g||_2.
    let norm = g.norm2_sq().sqrt() + 1;
    let mignotte = binomial(BigInt::from(dmax), BigInt::from(dmax / 2)) * norm;
    root_based.min(mignotte)
}

/// Multifactor Hensel lifting. `factors` are monic, pairwise coprime mod p with
/// f = lc(f) * prod(factors) mod p. Returns monic lifts modulo `m` (a power of p
/// whose exponent is a power of two).
pub fn hensel_lift(f: &IntPoly, factors: &[ModPoly], p: u64, m: &BigInt) -> Vec<IntPoly> {
    let fm = f.mod_floor(m);
    lift_rec(&fm, factors, p, m)
}

fn to_int(a: &ModPoly) -> IntPoly {
    IntPoly::new(a.coeffs().iter().map(|&c| BigInt::from(c)).collect())
}

fn lift_rec(f: &IntPoly, factors: &[ModPoly], p: u64, m: &BigInt) -> Vec<IntPoly> {
    if factors.len() == 1 {
        let inv = f.lead().modinv(m).expect("leading coefficient is a unit");
        return vec![f.scale(&inv).mod_floor(m)];
    }
    let half = factors.len() / 2;
    let (a, b) = factors.split_at(half);
    let lc_p = f.lead().mod_floor(&BigInt::from(p)).to_u64().unwrap();
    let mut g0 = ModPoly::constant(p, lc_p);
    for u in a {
        g0 = g0.mul(u);
    }
    let mut h0 = ModPoly::one(p);
    for u in b {
        h0 = h0.mul(u);
    }
    let (gcd, s0, t0) = g0.ext_gcd(&h0);
    debug_assert!(gcd.is_one());
    let (g, h) = lift_pair(f, &to_int(&g0), &to_int(&h0), &to_int(&s0), &to_int(&t0), p, m);
    let mut out = lift_rec(&g, a, p, m);
    out.extend(lift_rec(&h, b, p, m));
    out
}

/// Quadratic two-factor Hensel lifting from p to m.
fn lift_pair(
    f: &IntPoly,
    g: &IntPoly,
    h: &IntPoly,
    s: &IntPoly,
    t: &IntPoly,
    p: u64,
    m: &BigInt,
) -> (IntPoly, IntPoly) {
    let mut cur = BigInt::from(p);
    let (mut g, mut h, mut s, mut t) = (g.clone(), h.clone(), s.clone(), t.clone());
    let one = IntPoly::one();
    while &cur < m {
        let m2 = (&cur * &cur).min(m.clone());
        let e = f.sub(&g.mul(&h)).mod_floor(&m2);
        let (q, r) = s.mul(&e).divrem_monic_mod(&h, &m2);
        let g_new = g.add(&t.mul(&e)).add(&q.mul(&g)).mod_floor(&m2);
        let h_new = h.add(&r).mod_floor(&m2);
        let b = s.mul(&g_new).add(&t.mul(&h_new)).sub(&one).mod_floor(&m2);
        let (c, d) = s.mul(&b).divrem_monic_mod(&h_new, &m2);
        let s_new = s.sub(&d).mod_floor(&m2);
        let t_new = t.sub(&t.mul(&b)).sub(&c.mul(&g_new)).mod_floor(&m2);
        g = g_new;
        h = h_new;
        s = s_new;
        t = t_new;
        cur = m2;
    }
    (g, h)
}

/// Rational roots of f (exact), via linear factors.
pub fn rational_roots(f: &RationalPoly) -> Result<Vec<BigRational>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let fac = factor_over_q(f, &FactorConfig::with_cap(1))?;
    let mut roots: Vec<BigRational> = fac
        .factors
        .iter()
        .filter(|(g, _)| g.deg() == 1)
        .map(|(g, _)| -g.coeff(0) / g.coeff(1))
        .collect();
    roots.sort();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factor_full(c: &[i64]) -> FactorizationQ {
        factor_over_q(&RationalPoly::from_i64(c), &FactorConfig::default()).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let f = factor_full(&[-1, 0, 1]);
        assert_eq!(f.degrees(), vec![1, 1]);
        assert_eq!(f.product(), RationalPoly::from_i64(&[-1, 0, 1]));
    }

    #[test]
    fn swinnerton_dyer_like_irreducible() {
        // x^4 - 10x^2 + 1 is irreducible but splits mod every prime.
        let f = factor_full(&[1, 0, -10, 0, 1]);
        assert_eq!(f.degrees(), vec![4]);
    }

    #[test]
    fn repeated_factors() {
        // (x - 1)^3 (x^2 + 1) (2x + 3)
        let a = RationalPoly::from_i64(&[-1, 1]);
        let b = RationalPoly::from_i64(&[1, 0, 1]);
        let c = RationalPoly::from_i64(&[3, 2]);
        let f = a.pow(3).mul(&b).mul(&c).scale(&BigRational::new(5.into(), 7.into()));
        let fac = factor_over_q(&f, &FactorConfig::default()).unwrap();
        assert_eq!(fac.product(), f);
        assert!(fac.factors.contains(&(a, 3)));
    }

    #[test]
    fn cyclotomic_product() {
        // x^12 - 1 = Phi1 Phi2 Phi3 Phi4 Phi6 Phi12
        let mut c = vec![0i64; 13];
        c[0] = -1;
        c[12] = 1;
        let f = factor_full(&c);
        assert_eq!(f.degrees(), vec![1, 1, 2, 2, 2, 4]);
    }

    #[test]
    fn capped_leaves_residual() {
        // (x - 2) * (x^4 - 10x^2 + 1) with cap 2.
        let f = RationalPoly::from_i64(&[-2, 1]).mul(&RationalPoly::from_i64(&[1, 0, -10, 0, 1]));
        let fac = factor_over_q(&f, &FactorConfig::with_cap(2)).unwrap();
        assert_eq!(fac.degrees(), vec![1]);
        assert_eq!(fac.residual.len(), 1);
        assert_eq!(fac.product(), f);
    }

    #[test]
    fn rational_roots_of_cubic() {
        let f = RationalPoly::from_i64(&[6, -5, -2, 1]);
        let r = rational_roots(&f).unwrap();
        assert_eq!(r.len(), 3);
    }
}
