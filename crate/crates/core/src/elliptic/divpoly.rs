//! Division polynomials of the integral short model Y^2 = X^3 + A X + B.
//!
//! With F = 4(X^3 + A X + B) the y-free polynomials are f_n = psi_n for odd n
//! and f_n = psi_n / (2Y) for even n. The x-only object used everywhere is
//!
//! * X_n = f_n for odd n (degree (n^2 - 1)/2, leading coefficient n),
//! * X_n = (X^3 + A X + B) f_n for even n (degree (n^2 + 2)/2, leading coefficient n/2),
//!
//! so the roots of X_n are exactly the X-coordinates of the nonzero points
//! killed by n. For even n this is psi_n^2 with the factor 4Y^2 traded for the
//! cubic itself, which keeps the 2-torsion abscissae as simple roots.

use super::curve::{Curve, ShortModel};
use crate::arith::{IntPoly, ModPoly, RationalPoly};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Minimal ring interface needed by the recurrence.
pub trait RecurrenceRing: Clone {
    fn r_mul(&self, o: &Self) -> Self;
    fn r_sub(&self, o: &Self) -> Self;
}

impl RecurrenceRing for IntPoly {
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn r_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
}

impl RecurrenceRing for ModPoly {
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn r_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
}

/// Evaluates the y-free recurrence. `base` holds f_0..f_4 and F^2.
struct Recurrence<P: RecurrenceRing> {
    memo: BTreeMap<usize, P>,
    f_sq: P,
}

impl<P: RecurrenceRing> Recurrence<P> {
    fn get(&mut self, n: usize) -> P {
        if let Some(v) = self.memo.get(&n) {
            return v.clone();
        }
        let m = n / 2;
        let v = if n % 2 == 1 {
            let a = self.get(m + 2);
            let b = self.get(m);
            let c = self.get(m - 1);
            let d = self.get(m + 1);
            let b3 = b.r_mul(&b).r_mul(&b);
            let d3 = d.r_mul(&d).r_mul(&d);
            if m.is_multiple_of(2) {
                self.f_sq.r_mul(&a).r_mul(&b3).r_sub(&c.r_mul(&d3))
            } else {
                a.r_mul(&b3).r_sub(&self.f_sq.r_mul(&c).r_mul(&d3))
            }
        } else {
            let a = self.get(m);
            let p2 = self.get(m + 2);
            let m1 = self.get(m - 1);
            let m2 = self.get(m - 2);
            let p1 = self.get(m + 1);
            let t = p2.r_mul(&m1).r_mul(&m1).r_sub(&m2.r_mul(&p1).r_mul(&p1));
            a.r_mul(&t)
        };
        self.memo.insert(n, v.clone());
        v
    }
}

fn base_int(a: &BigInt, b: &BigInt) -> (Vec<IntPoly>, IntPoly, IntPoly) {
    let z = BigInt::zero;
    let i = |v: i64| BigInt::from(v);
    let a2 = a * a;
    let f0 = IntPoly::zero();
    let f1 = IntPoly::one();
    let f2 = IntPoly::one();
    let f3 = IntPoly::new(vec![-&a2, i(12) * b, i(6) * a, z(), i(3)]);
    let f4 = IntPoly::new(vec![
        i(-16) * b * b - i(2) * &a2 * a,
        i(-8) * a * b,
        i(-10) * &a2,
        i(40) * b,
        i(10) * a,
        z(),
        i(2),
    ]);
    let cubic = IntPoly::new(vec![b.clone(), a.clone(), z(), i(1)]);
    let big_f = cubic.scale(&i(4));
    (vec![f0, f1, f2, f3, f4], big_f.mul(&big_f), cubic)
}

/// y-free f_n over Z for the short model (A, B).
pub fn f_n_int(a: &BigInt, b: &BigInt, n: usize) -> IntPoly {
    let (base, f_sq, _) = base_int(a, b);
    let mut rec = Recurrence {
        memo: base.into_iter().enumerate().collect(),
        f_sq,
    };
    rec.get(n)
}

/// x-only division polynomial X_n over Z (short coordinates).
pub fn x_division_int(a: &BigInt, b: &BigInt, n: usize) -> IntPoly {
    assert!(n >= 1);
    if n == 1 {
        return IntPoly::one();
    }
    let f = f_n_int(a, b, n);
    if n.is_multiple_of(2) {
        let (_, _, cubic) = base_int(a, b);
        cubic.mul(&f)
    } else {
        f
    }
}

fn base_mod(a: u64, b: u64, q: u64) -> (Vec<ModPoly>, ModPoly, ModPoly) {
    let ai = BigInt::from(a);
    let bi = BigInt::from(b);
    let (base, f_sq, cubic) = base_int(&ai, &bi);
    (
        base.iter().map(|p| p.mod_p(q)).collect(),
        f_sq.mod_p(q),
        cubic.mod_p(q),
    )
}

/// x-only division polynomial X_n mod q, computed entirely in Z/q.
pub fn x_division_mod(a: u64, b: u64, n: usize, q: u64) -> ModPoly {
    if n == 1 {
        return ModPoly::one(q);
    }
    let (base, f_sq, cubic) = base_mod(a % q, b % q, q);
    let mut rec = Recurrence {
        memo: base.into_iter().enumerate().collect(),
        f_sq,
    };
    let f = rec.get(n);
    if n.is_multiple_of(2) {
        cubic.mul(&f)
    } else {
        f
    }
}

/// The primitive part X_{l^k} / X_{l^(k-1)}: abscissae of points of exact order l^k.
pub fn primitive_prime_power_int(a: &BigInt, b: &BigInt, l: usize, k: u32) -> IntPoly {
    let n = l.pow(k);
    let full = x_division_int(a, b, n);
    if k == 1 {
        return full;
    }
    let lower = x_division_int(a, b, n / l);
    full.div_exact(&lower).expect("X_{n/l} divides X_n")
}

pub fn primitive_prime_power_mod(a: u64, b: u64, l: usize, k: u32, q: u64) -> ModPoly {
    let n = l.pow(k);
    let full = x_division_mod(a, b, n, q);
    if k == 1 {
        return full;
    }
    let lower = x_division_mod(a, b, n / l, q);
    full.div_exact(&lower)
}

/// Expected degree of X_n.
pub fn x_division_degree(n: usize) -> usize {
    if n == 1 {
        0
    } else if n % 2 == 1 {
        (n * n - 1) / 2
    } else {
        (n * n + 2) / 2
    }
}

/// A division polynomial of a curve, in short coordinates and (optionally) the
/// curve's own coordinates.
#[derive(Clone, Debug)]
pub struct DivisionPoly {
    pub n: usize,
    pub model: ShortModel,
    pub short: DivisionPolyData,
}

#[derive(Clone, Debug)]
pub enum DivisionPolyData {
    OverZ(IntPoly),
    ModQ(ModPoly),
}

impl DivisionPoly {
    pub fn degree(&self) -> usize {
        match &self.short {
            DivisionPolyData::OverZ(p) => p.deg(),
            DivisionPolyData::ModQ(p) => p.degree().unwrap_or(0),
        }
    }

    /// Over-Q division polynomial in the curve's own x-coordinate:
    /// X_n(alpha x + beta) / alpha^deg, which has the same leading coefficient.
    pub fn in_curve_coordinates(&self) -> Option<RationalPoly> {
        let DivisionPolyData::OverZ(p) = &self.short else {
            return None;
        };
        let lin = RationalPoly::new(vec![self.model.beta.clone(), self.model.alpha.clone()]);
        let composed = RationalPoly::from_int_poly(p).compose(&lin);
        let scale = num_traits::pow(self.model.alpha.clone(), p.deg());
        Some(composed.scale(&(BigRational::one() / scale)))
    }
}

/// Division polynomial of E, over Z or modulo a good prime q >= 5.
pub fn division_poly(e: &Curve, n: usize, modulus: Option<u64>) -> Result<DivisionPoly> {
    if n == 0 {
        return Err(Error::InvalidInput("division index must be positive".into()));
    }
    let model = e.short_model();
    let short = match modulus {
        None => DivisionPolyData::OverZ(x_division_int(&model.a, &model.b, n)),
        Some(q) => {
            if q < 5 || !crate::arith::primes::is_prime(q) || !e.has_good_reduction(q) || !short_model_good(&model, q) {
                return Err(Error::BadReduction(q));
            }
            let (a, b) = short_mod(&model, q);
            DivisionPolyData::ModQ(x_division_mod(a, b, n, q))
        }
    };
    Ok(DivisionPoly { n, model, short })
}

/// (A mod q, B mod q) for the short model.
pub fn short_mod(m: &ShortModel, q: u64) -> (u64, u64) {
    let qb = BigInt::from(q);
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    (
        m.a.mod_floor(&qb).to_u64().unwrap(),
        m.b.mod_floor(&qb).to_u64().unwrap(),
    )
}

/// The short model has good reduction at q when q does not divide 4A^3 + 27B^2 or alpha.
pub fn short_model_good(m: &ShortModel, q: u64) -> bool {
    let qb = BigInt::from(q);
    let d = BigInt::from(4) * &m.a * &m.a * &m.a + BigInt::from(27) * &m.b * &m.b;
    !(d % &qb).is_zero() && !(m.alpha.numer() % &qb).is_zero() && !(m.alpha.denom() % &qb).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi3_formula() {
        let (a, b) = (BigInt::from(5), BigInt::from(-7));
        let f3 = x_division_int(&a, &b, 3);
        assert_eq!(f3, IntPoly::from_i64(&[-25, -84, 30, 0, 3]));
    }

    #[test]
    fn degrees_and_leading_coefficients() {
        let (a, b) = (BigInt::from(2), BigInt::from(3));
        for n in 2..=15usize {
            let x = x_division_int(&a, &b, n);
            assert_eq!(x.deg(), x_division_degree(n), "n={n}");
            let lc = if n % 2 == 1 { n } else { n / 2 };
            assert_eq!(x.lead(), BigInt::from(lc));
        }
    }

    #[test]
    fn mod_q_matches_reduction() {
        let (a, b) = (BigInt::from(-30), BigInt::from(63));
        for n in [5usize, 8, 11] {
            let over_z = x_division_int(&a, &b, n);
            assert_eq!(x_division_mod(q_res(&a, 101), q_res(&b, 101), n, 101), over_z.mod_p(101));
        }
    }

    fn q_res(a: &BigInt, q: u64) -> u64 {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        a.mod_floor(&BigInt::from(q)).to_u64().unwrap()
    }

    #[test]
    fn degree_163_mod_q() {
        let f = x_division_mod(3, 5, 163, 487);
        assert_eq!(f.degree(), Some(13284));
        assert_eq!(f.lead(), 163);
    }
}
