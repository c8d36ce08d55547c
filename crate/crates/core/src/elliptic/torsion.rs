//! Rational torsion: an upper bound from point counts mod good primes, then the
//! exact group from the rational roots of division polynomials.

use super::curve::Curve;
use super::divpoly::division_poly;
use super::point::{count_points, CurveOver, Point};
use crate::arith::primes::{factorize, gcd_u64, PrimeIter};
use crate::arith::{rational_roots, rat};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A finite abelian group with at most two generators, Z/m x Z/n with m | n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorsionGroup {
    pub m: u64,
    pub n: u64,
}

impl TorsionGroup {
    pub fn trivial() -> Self {
        TorsionGroup { m: 1, n: 1 }
    }

    pub fn cyclic(n: u64) -> Self {
        TorsionGroup { m: 1, n }
    }

    pub fn order(&self) -> u64 {
        self.m * self.n
    }

    /// Product of groups of coprime orders (or one factor trivial).
    pub fn combine(&self, o: &TorsionGroup) -> TorsionGroup {
        TorsionGroup { m: self.m * o.m, n: self.n * o.n }
    }

    /// l-primary group Z/l^a x Z/l^b from the counts N_j = #E[l^j] for j = 0..,
    /// with N_0 = 1.
    pub fn from_counts(l: u64, counts: &[u64]) -> TorsionGroup {
        let mut a = 0u32;
        let mut b = 0u32;
        for w in counts.windows(2) {
            let r = w[1] / w[0];
            if r >= l {
                a += 1;
            }
            if r == l * l {
                b += 1;
            }
        }
        TorsionGroup { m: l.pow(b), n: l.pow(a) }
    }

    pub fn is_mazur(&self) -> bool {
        match self.m {
            1 => (1..=10).contains(&self.n) || self.n == 12,
            2 => [2, 4, 6, 8].contains(&self.n),
            _ => false,
        }
    }
}

impl std::fmt::Display for TorsionGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.m, self.n) {
            (1, 1) => write!(f, "trivial"),
            (1, n) => write!(f, "Z/{n}"),
            (m, n) => write!(f, "Z/{m} x Z/{n}"),
        }
    }
}

/// gcd of #E(F_q) over the first `count` odd good primes.
pub fn torsion_order_bound(e: &Curve, count: usize) -> Result<u64> {
    let mut g = 0u64;
    let mut used = 0;
    for q in PrimeIter::from(3) {
        if used >= count || q > 100_000 {
            break;
        }
        if !e.has_good_reduction(q) {
            continue;
        }
        g = gcd_u64(g, count_points(e, q)?);
        used += 1;
    }
    if g == 0 {
        return Err(Error::Indeterminate("no good primes found".into()));
    }
    Ok(g)
}

/// Rational points whose x-coordinate is a given rational.
pub fn points_with_x(e: &Curve, x: &BigRational) -> Vec<Point<BigRational>> {
    let [a1, a2, a3, a4, a6] = e.ainvs().clone();
    // y^2 + (a1 x + a3) y - (x^3 + a2 x^2 + a4 x + a6) = 0.
    let h = &a1 * x + &a3;
    let g = x * x * x + &a2 * x * x + &a4 * x + &a6;
    let disc = &h * &h + rat(4) * &g;
    if disc.is_negative() {
        return Vec::new();
    }
    let Some(s) = rational_sqrt(&disc) else {
        return Vec::new();
    };
    let y1 = (-&h + &s) / rat(2);
    let y2 = (-&h - &s) / rat(2);
    if s.is_zero() {
        vec![Point::Affine(x.clone(), y1)]
    } else {
        vec![Point::Affine(x.clone(), y1), Point::Affine(x.clone(), y2)]
    }
}

pub fn rational_sqrt(a: &BigRational) -> Option<BigRational> {
    if a.is_negative() {
        return None;
    }
    let sq = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    Some(BigRational::new(sq(a.numer())?, sq(a.denom())?))
}

/// Rational points of E killed by n, excluding the identity.
pub fn rational_points_killed_by(e: &Curve, n: usize) -> Result<Vec<Point<BigRational>>> {
    let dp = division_poly(e, n, None)?;
    let f = dp.in_curve_coordinates().expect("over Z");
    let mut out = Vec::new();
    for x in rational_roots(&f)? {
        out.extend(points_with_x(e, &x));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorsionOverQ {
    pub group: TorsionGroup,
    pub bound: u64,
    /// Points (as strings) generating each primary part, with their orders.
    pub witnesses: Vec<(String, String, u64)>,
}

/// E(Q)_tors computed exactly.
pub fn torsion_over_q(e: &Curve) -> Result<TorsionOverQ> {
    let bound = torsion_order_bound(e, 30)?;
    let c = CurveOver::from_curve(e, &rat(0))?;
    let mut group = TorsionGroup::trivial();
    let mut witnesses = Vec::new();
    for (l, k) in factorize(bound) {
        let mut counts = vec![1u64];
        let mut best: Option<(Point<BigRational>, u64)> = None;
        for j in 1..=k {
            let n = l.pow(j) as usize;
            let pts = rational_points_killed_by(e, n)?;
            counts.push(pts.len() as u64 + 1);
            for p in pts {
                debug_assert!(c.contains(&p));
                let ord = c.order(&p, n as u64).ok_or_else(|| {
                    Error::Indeterminate(format!("point killed by {n} has larger order"))
                })?;
                if best.as_ref().is_none_or(|(_, o)| ord > *o) {
                    best = Some((p, ord));
                }
            }
            if counts[j as usize] == counts[j as usize - 1] {
                break;
            }
        }
        let part = TorsionGroup::from_counts(l, &counts);
        if let Some((Point::Affine(x, y), o)) = best {
            witnesses.push((x.to_string(), y.to_string(), o));
        }
        group = group.combine(&part);
    }
    // Normalise m | n.
    let group = normalise(group);
    if !group.is_mazur() {
        return Err(Error::Indeterminate(format!("computed group {group} is not in Mazur's list")));
    }
    Ok(TorsionOverQ { group, bound, witnesses })
}

/// Rewrites Z/m x Z/n so that m divides n.
pub fn normalise(g: TorsionGroup) -> TorsionGroup {
    let m = gcd_u64(g.m, g.n);
    TorsionGroup { m, n: g.m * g.n / m }
}

/// Brute-force Lutz–Nagell enumeration for integral models, used as an oracle.
pub fn lutz_nagell_torsion(e: &Curve) -> Option<TorsionGroup> {
    if !e.is_integral() {
        return None;
    }
    let m = e.short_model();
    let (a, b) = (m.a.clone(), m.b.clone());
    let d = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
    let mut pts: Vec<(BigInt, BigInt)> = Vec::new();
    let d_abs: BigInt = d.abs();
    let ys = candidate_ys(&d_abs)?;
    for y in ys {
        // Integer roots of X^3 + aX + b - y^2.
        let c0 = &b - &y * &y;
        for x in integer_roots_cubic(&a, &c0) {
            pts.push((x, y.clone()));
        }
    }
    let short = Curve::new(
        [rat(0), rat(0), rat(0), BigRational::from_integer(a), BigRational::from_integer(b)],
        None,
    )
    .ok()?;
    let c = CurveOver::from_curve(&short, &rat(0)).ok()?;
    let mut by_order: BTreeMap<u64, u64> = BTreeMap::new();
    let mut total = 1u64;
    for (x, y) in pts {
        let p = Point::Affine(BigRational::from_integer(x), BigRational::from_integer(y));
        if let Some(o) = c.order(&p, 12) {
            *by_order.entry(o).or_default() += 1;
            total += 1;
        }
    }
    let exponent = by_order.keys().copied().fold(1u64, |acc, o| acc / gcd_u64(acc, o) * o);
    Some(normalise(TorsionGroup { m: total / exponent, n: exponent }))
}

fn candidate_ys(d: &BigInt) -> Option<Vec<BigInt>> {
    // y = 0 or y^2 | D.
    let primes = crate::arith::primes::factor_big_smooth(d, 1_000_000)?;
    let mut ys = vec![BigInt::zero()];
    let mut exps: Vec<(u64, u32)> = Vec::new();
    let mut r = d.clone();
    for p in primes {
        let pb = BigInt::from(p);
        let mut e = 0;
        while (&r % &pb).is_zero() {
            r /= &pb;
            e += 1;
        }
        exps.push((p, e / 2));
    }
    let mut divs = vec![BigInt::from(1)];
    for (p, e) in exps {
        let mut next = Vec::new();
        for dv in &divs {
            let mut pw = dv.clone();
            for _ in 0..=e {
                next.push(pw.clone());
                pw *= p;
            }
        }
        divs = next;
    }
    for dv in divs {
        ys.push(dv.clone());
        ys.push(-dv);
    }
    Some(ys)
}

fn integer_roots_cubic(a: &BigInt, c0: &BigInt) -> Vec<BigInt> {
    let f = crate::arith::RationalPoly::new(vec![
        BigRational::from_integer(c0.clone()),
        BigRational::from_integer(a.clone()),
        BigRational::zero(),
        rat(1),
    ]);
    rational_roots(&f)
        .unwrap_or_default()
        .into_iter()
        .filter(|r| r.is_integer())
        .map(|r| r.to_integer())
        .collect()
}
