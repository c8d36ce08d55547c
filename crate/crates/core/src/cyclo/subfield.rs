//! Subfields Q(zeta_m)^H presented by a Gaussian period, and the layers Q_{n,p}.

use super::cyclofield::{units_mod, CycloField};
use super::numfield::{solve_linear, NfElem, NumberField};
use crate::arith::factor_q::modular_squarefree_witness;
use crate::arith::primes::{mul_mod, pow_mod};
use crate::arith::{rat, RationalPoly, Scalar};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeSet;
use std::sync::Arc;

/// True when `h` is a subgroup of (Z/m)^x.
pub fn is_subgroup(m: u64, h: &[u64]) -> bool {
    let s: BTreeSet<u64> = h.iter().map(|x| x % m).collect();
    if !s.contains(&(1 % m)) {
        return false;
    }
    s.iter().all(|&a| s.iter().all(|&b| s.contains(&mul_mod(a, b, m))))
}

/// Subgroup generated by `gens` in (Z/m)^x, sorted.
pub fn subgroup_generated(m: u64, gens: &[u64]) -> Vec<u64> {
    let mut s: BTreeSet<u64> = BTreeSet::new();
    s.insert(1 % m);
    let mut frontier = vec![1 % m];
    while let Some(a) = frontier.pop() {
        for &g in gens {
            let b = mul_mod(a, g % m, m);
            if s.insert(b) {
                frontier.push(b);
            }
        }
    }
    s.into_iter().collect()
}

/// Coset representatives (least elements) of H in (Z/m)^x.
pub fn coset_reps(m: u64, h: &[u64]) -> Vec<u64> {
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for c in units_mod(m) {
        if seen.contains(&c) {
            continue;
        }
        reps.push(c);
        for &x in h {
            seen.insert(mul_mod(c, x, m));
        }
    }
    reps
}

/// Representatives of the cosets of H0 inside H, both subgroups of (Z/m)^x with H0 <= H.
pub fn coset_reps_within(m: u64, h: &[u64], h0: &[u64]) -> Vec<u64> {
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    let mut hs: Vec<u64> = h.to_vec();
    hs.sort_unstable();
    for c in hs {
        if seen.contains(&c) {
            continue;
        }
        reps.push(c);
        for &x in h0 {
            seen.insert(mul_mod(c, x, m));
        }
    }
    reps
}

/// Conductor and fixing group of the layer Q_{n,p}: for odd p, the subgroup of order
/// p - 1 in (Z/p^(n+1))^x; for p = 2, {+1, -1} in (Z/2^(n+2))^x.
pub fn layer_group(p: u64, n: u32) -> (u64, Vec<u64>) {
    if p == 2 {
        let m = 1u64 << (n + 2);
        return (m, vec![1, m - 1]);
    }
    let m = p.pow(n + 1);
    let h = units_mod(m).into_iter().filter(|&c| pow_mod(c, p - 1, m) == 1).collect();
    (m, h)
}

/// Q(zeta_m)^H with a primitive element theta (a Gaussian period when that is primitive).
#[derive(Debug)]
pub struct Subfield {
    pub ambient: Arc<CycloField>,
    pub group: Vec<u64>,
    pub cosets: Vec<u64>,
    pub theta: NfElem,
    pub minpoly: RationalPoly,
    pub field: Arc<NumberField>,
    theta_pows: Vec<Vec<BigRational>>,
}

impl Subfield {
    pub fn new(ambient: Arc<CycloField>, group: &[u64]) -> Result<Subfield> {
        let m = ambient.conductor();
        let mut group: Vec<u64> = group.iter().map(|x| x % m).collect();
        group.sort_unstable();
        group.dedup();
        if !is_subgroup(m, &group) {
            return Err(Error::InvalidInput(format!("{group:?} is not a subgroup mod {m}")));
        }
        let cosets = coset_reps(m, &group);
        let trace = |a: u64| ambient.combination(group.iter().map(|&h| (rat(1), mul_mod(a % m, h, m))));
        let base = trace(1);
        let mut candidates = vec![base.clone()];
        for k in 1..=3i64 {
            for a in 2..m.min(12) {
                candidates.push(base.add(&trace(a).mul(&base.small(k))));
            }
        }
        for theta in candidates {
            let minpoly = conjugate_product(&ambient, &theta, &cosets)?;
            let (_, ip) = minpoly.to_int_parts();
            if cosets.len() > 1 && modular_squarefree_witness(&ip, 40).is_none() && !exact_squarefree(&minpoly) {
                continue;
            }
            let n = cosets.len();
            let field = NumberField::new(minpoly.clone(), format!("Q(zeta_{m})^H[{n}]"));
            let mut theta_pows = Vec::with_capacity(n);
            let mut cur = theta.one_like();
            for _ in 0..n {
                theta_pows.push(cur.coords());
                cur = cur.mul(&theta);
            }
            return Ok(Subfield { ambient, group, cosets, theta, minpoly, field, theta_pows });
        }
        Err(Error::Indeterminate(format!("no primitive element found for subfield of Q(zeta_{m})")))
    }

    /// The layer Q_{n,p}.
    pub fn layer(p: u64, n: u32) -> Result<Subfield> {
        let (m, h) = layer_group(p, n);
        Subfield::new(CycloField::new(m), &h)
    }

    pub fn degree(&self) -> usize {
        self.cosets.len()
    }

    pub fn conductor(&self) -> u64 {
        self.ambient.conductor()
    }

    pub fn generator(&self) -> NfElem {
        NfElem::generator(&self.field)
    }

    /// Image of an element of the presented field in Q(zeta_m).
    pub fn to_ambient(&self, a: &NfElem) -> NfElem {
        let mut acc = vec![BigRational::zero(); self.ambient.degree()];
        for (c, pw) in a.poly().coeffs().iter().zip(&self.theta_pows) {
            if c.is_zero() {
                continue;
            }
            for (o, v) in acc.iter_mut().zip(pw) {
                *o += c * v;
            }
        }
        self.ambient.from_coords(acc)
    }

    /// Coordinates of an ambient element in the presented field, if it lies there.
    pub fn from_ambient(&self, a: &NfElem) -> Option<NfElem> {
        let x = solve_linear(&self.theta_pows, &a.coords())?;
        Some(NfElem::new(&self.field, RationalPoly::new(x)))
    }

    /// Fixed by every sigma_h, h in H.
    pub fn is_fixed(&self, a: &NfElem) -> bool {
        self.group.iter().all(|&h| self.ambient.automorphism(h as i64, a).map(|b| b == *a).unwrap_or(false))
    }
}

/// prod over coset reps c of (x - sigma_c(theta)); rational when theta is H-fixed.
fn conjugate_product(k: &CycloField, theta: &NfElem, cosets: &[u64]) -> Result<RationalPoly> {
    let mut poly: Vec<NfElem> = vec![theta.one_like()];
    for &c in cosets {
        let r = k.automorphism(c as i64, theta)?;
        let mut next = vec![theta.zero_like(); poly.len() + 1];
        for (i, a) in poly.iter().enumerate() {
            next[i + 1] = next[i + 1].add(a);
            next[i] = next[i].sub(&a.mul(&r));
        }
        poly = next;
    }
    let mut out = Vec::with_capacity(poly.len());
    for a in poly {
        if !a.is_rational() {
            return Err(Error::InvalidInput("element is not fixed by the subgroup".into()));
        }
        out.push(a.poly().coeff(0));
    }
    Ok(RationalPoly::new(out))
}

fn exact_squarefree(f: &RationalPoly) -> bool {
    f.gcd(&f.derivative()).deg() == 0
}
