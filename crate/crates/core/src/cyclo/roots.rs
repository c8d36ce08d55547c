//! Roots of polynomials over a number field by Trager's squarefree norm.

use super::cyclofield::CycloField;
use super::numfield::{NfElem, NumberField};
use super::subfield::Subfield;
use crate::arith::factor_q::modular_squarefree_witness;
use crate::arith::resultant::interpolate;
use crate::arith::{factor_over_q, gpoly, rat, resultant, FactorConfig, RationalPoly, Scalar};
use crate::error::{Error, Result};
use crate::arith::primes::{inv_mod, mul_mod, PrimeIter};
use crate::arith::ModPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::Arc;

/// Largest shift tried before giving up on a squarefree norm.
const MAX_SHIFT: i64 = 24;

/// Primes used by the modular root extraction before giving up.
const MAX_MODULAR_PRIMES: usize = 400;

/// Embeds a rational polynomial into L[x].
pub fn lift_poly(k: &Arc<NumberField>, f: &RationalPoly) -> Vec<NfElem> {
    f.coeffs().iter().map(|c| NfElem::from_rational(k, c.clone())).collect()
}

/// N(x) = Norm_{L/Q} f(x - s theta), by evaluation at integers and interpolation.
fn shifted_norm(k: &Arc<NumberField>, f: &[NfElem], s: i64) -> Result<RationalPoly> {
    let p = k.poly();
    let n = k.degree();
    let d = f.len() - 1;
    let npts = n * d + 1;
    let mut xs = Vec::with_capacity(npts);
    let mut ys = Vec::with_capacity(npts);
    // (x0 - s y) as a polynomial in y.
    for x0 in 0..npts as i64 {
        let lin = RationalPoly::from_i64(&[x0, -s]);
        let mut h = RationalPoly::zero();
        for c in f.iter().rev() {
            h = h.mul(&lin).add(c.poly()).rem(p);
        }
        let v = if h.is_zero() { BigRational::zero() } else { resultant(p, &h)? };
        xs.push(rat(x0));
        ys.push(v);
    }
    Ok(interpolate(&xs, &ys))
}

/// Distinct roots of f (coefficients in L) lying in L, each verified by exact evaluation.
pub fn roots_over_field(f: &[NfElem], cfg: &FactorConfig) -> Result<Vec<NfElem>> {
    let f = gpoly::trim(f.to_vec());
    if f.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if f.len() == 1 {
        return Ok(Vec::new());
    }
    let k = f[0].field().clone();
    // Squarefree part, over Q when the coefficients are rational.
    let f = if f.iter().all(|c| c.is_rational()) {
        let q = RationalPoly::new(f.iter().map(|c| c.poly().coeff(0)).collect());
        let g = q.gcd(&q.derivative());
        lift_poly(&k, &q.divrem(&g).0.monic())
    } else {
        let df: Vec<NfElem> = f.iter().enumerate().skip(1).map(|(i, c)| c.mul(&c.small(i as i64))).collect();
        let g = gpoly::gcd(&f, &df);
        if g.len() > 1 { div_exact(&f, &g) } else { gpoly::monic(&f) }
    };
    if f.len() == 2 {
        return Ok(vec![f[0].neg().mul(&f[1].inv().unwrap())]);
    }
    let n = k.degree();
    let theta = NfElem::generator(&k);
    for s in 0..=MAX_SHIFT {
        cfg.check_deadline()?;
        let norm = shifted_norm(&k, &f, s)?;
        let (_, ip) = norm.to_int_parts();
        if modular_squarefree_witness(&ip, 20).is_none() {
            continue;
        }
        let fac = factor_over_q(&norm, &FactorConfig { degree_cap: Some(n), ..cfg.clone() })?;
        let mut roots = Vec::new();
        let shift = theta.small(s);
        let st = theta.mul(&shift);
        for (nk, _) in fac.factors.iter().filter(|(h, _)| h.deg() == n) {
            if f.len() > 3 {
                // Euclid in L[x] blows up the coefficients; work modulo split primes.
                if let Some(r) = modular_root(&k, &f, nk, s, cfg)? {
                    roots.push(r);
                }
                continue;
            }
            // N_k(x + s theta) mod f, by Horner in L[x].
            let lin = vec![st.clone(), theta.one_like()];
            let mut t: Vec<NfElem> = Vec::new();
            for c in nk.coeffs().iter().rev() {
                t = gpoly::mul(&t, &lin);
                let cc = NfElem::from_rational(&k, c.clone());
                if t.is_empty() {
                    t.push(cc);
                } else {
                    t[0] = t[0].add(&cc);
                }
                t = gpoly::rem(&gpoly::trim(t), &f);
            }
            let h = gpoly::gcd(&f, &t);
            if h.len() == 2 {
                let r = h[0].neg();
                if gpoly::eval(&f, &r).is_zero_elem() {
                    roots.push(r);
                }
            }
        }
        roots.sort_by_key(|r| format!("{:?}", r.poly().coeffs()));
        roots.dedup();
        return Ok(roots);
    }
    Err(Error::Indeterminate("no squarefree norm found".into()))
}

fn rat_mod_p(a: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = a.denom().mod_floor(&pb).to_u64()?;
    let n = a.numer().mod_floor(&pb).to_u64()?;
    Some(mul_mod(n, inv_mod(d, p)?, p))
}

fn reduce_poly(f: &RationalPoly, p: u64) -> Option<ModPoly> {
    let c: Option<Vec<u64>> = f.coeffs().iter().map(|a| rat_mod_p(a, p)).collect();
    Some(ModPoly::new(p, c?))
}

/// Coefficients of the polynomial of degree < xs.len() through the points, mod p.
fn interpolate_mod(xs: &[u64], ys: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut out = ModPoly::zero(p);
    for (j, (&xj, &yj)) in xs.iter().zip(ys).enumerate() {
        let mut basis = ModPoly::one(p);
        let mut den = 1u64;
        for (i, &xi) in xs.iter().enumerate() {
            if i != j {
                basis = basis.mul(&ModPoly::new(p, vec![(p - xi) % p, 1]));
                den = mul_mod(den, (xj + p - xi) % p, p);
            }
        }
        out = out.add(&basis.scale(mul_mod(yj, inv_mod(den, p)?, p)));
    }
    Some((0..xs.len()).map(|i| out.coeff(i)).collect())
}

/// Rational a/b with a = b r mod m and |a|, b below sqrt(m/2).
pub fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// The root x - r of gcd(f, N_k(x + s theta)) recovered from its images at primes
/// where the defining polynomial of L splits into distinct linear factors.
fn modular_root(
    k: &Arc<NumberField>,
    f: &[NfElem],
    nk: &RationalPoly,
    s: i64,
    cfg: &FactorConfig,
) -> Result<Option<NfElem>> {
    let n = k.degree();
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); n];
    let mut used = 0;
    let mut last: Option<Vec<BigRational>> = None;
    for p in PrimeIter::from(1 << 31) {
        cfg.check_deadline()?;
        if used > MAX_MODULAR_PRIMES {
            return Err(Error::Indeterminate("modular root extraction did not converge".into()));
        }
        let Some(pm) = reduce_poly(k.poly(), p) else { continue };
        let Ok(thetas) = pm.roots() else { continue };
        if thetas.len() != n {
            continue;
        }
        let Some(nkp) = reduce_poly(nk, p) else { continue };
        let cs: Option<Vec<ModPoly>> = f.iter().map(|c| reduce_poly(c.poly(), p)).collect();
        let Some(cs) = cs else { continue };
        let mut images = Vec::with_capacity(n);
        for &th in &thetas {
            let fj = ModPoly::new(p, cs.iter().map(|c| c.eval(th)).collect());
            if fj.degree() != Some(f.len() - 1) {
                break;
            }
            let shift = ModPoly::new(p, vec![mul_mod((s.rem_euclid(p as i64)) as u64, th, p), 1]);
            let mut t = ModPoly::zero(p);
            for &c in nkp.coeffs().iter().rev() {
                t = t.mul(&shift).add(&ModPoly::constant(p, c)).rem(&fj);
            }
            let h = fj.gcd(&t);
            if h.degree() != Some(1) {
                break;
            }
            let h = h.monic();
            images.push((p - h.coeff(0)) % p);
        }
        if images.len() != n {
            continue;
        }
        let Some(coords) = interpolate_mod(&thetas, &images, p) else { continue };
        used += 1;
        // CRT into the accumulated residues.
        let pb = BigInt::from(p);
        let minv = BigInt::from(inv_mod((&modulus % &pb).to_u64().unwrap(), p).unwrap());
        for (a, &c) in acc.iter_mut().zip(&coords) {
            let diff = (BigInt::from(c) - &*a).mod_floor(&pb);
            *a += &modulus * ((diff * &minv) % &pb);
        }
        modulus *= &pb;
        let rec: Option<Vec<BigRational>> = acc.iter().map(|a| rational_reconstruct(a, &modulus)).collect();
        let Some(rec) = rec else { continue };
        if last.as_ref() == Some(&rec) || used % 4 == 0 {
            let r = NfElem::new(k, RationalPoly::new(rec.clone()));
            if gpoly::eval(f, &r).is_zero_elem() {
                return Ok(Some(r));
            }
        }
        last = Some(rec);
    }
    Ok(None)
}

fn div_exact(a: &[NfElem], d: &[NfElem]) -> Vec<NfElem> {
    let dn = d.len() - 1;
    let inv = d[dn].inv().unwrap();
    let mut r = a.to_vec();
    let mut q = vec![a[0].zero_like(); a.len() - dn];
    for i in (dn..r.len()).rev() {
        let t = r[i].mul(&inv);
        for (j, dj) in d.iter().enumerate() {
            r[i - dn + j] = r[i - dn + j].sub(&t.mul(dj));
        }
        q[i - dn] = t;
    }
    gpoly::monic(&gpoly::trim(q))
}

/// Roots in L of a rational polynomial.
pub fn roots_in_number_field(f: &RationalPoly, k: &Arc<NumberField>, cfg: &FactorConfig) -> Result<Vec<NfElem>> {
    roots_over_field(&lift_poly(k, f), cfg)
}

/// A square root of a in its field, if one exists.
pub fn sqrt_in_field(a: &NfElem, cfg: &FactorConfig) -> Result<Option<NfElem>> {
    if a.is_zero_elem() {
        return Ok(Some(a.clone()));
    }
    let f = vec![a.neg(), a.zero_like(), a.one_like()];
    Ok(roots_over_field(&f, cfg)?.into_iter().next())
}

/// Roots of f in Q(zeta_m).
pub fn roots_in_cyclo(f: &RationalPoly, k: &CycloField, cfg: &FactorConfig) -> Result<Vec<NfElem>> {
    roots_in_number_field(f, k.number_field(), cfg)
}

/// Roots of f in a subfield, returned as elements of the ambient cyclotomic field.
/// Each root is checked to be fixed by the subgroup.
pub fn roots_in_subfield(f: &RationalPoly, l: &Subfield, cfg: &FactorConfig) -> Result<Vec<NfElem>> {
    let mut out = Vec::new();
    for r in roots_in_number_field(f, &l.field, cfg)? {
        let a = l.to_ambient(&r);
        debug_assert!(l.is_fixed(&a));
        out.push(a);
    }
    Ok(out)
}
