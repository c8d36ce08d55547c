//! Orders and indices of Borel-type subgroups of GL2(Z/p^k).

use crate::arith::primes::{gcd_u64, is_prime, mul_mod};
use crate::cyclo::{is_subgroup, subgroup_generated};
use crate::error::{Error, Result};

/// |GL2(Z/p^k)| = p^(4(k-1)) (p^2 - 1)(p^2 - p).
pub fn gl2_order(p: u64, k: u32) -> Result<u64> {
    if !is_prime(p) || k == 0 {
        return Err(Error::InvalidInput("need a prime p and k >= 1".into()));
    }
    let base = (p * p - 1) * (p * p - p);
    p.checked_pow(4 * (k - 1))
        .and_then(|x| x.checked_mul(base))
        .ok_or_else(|| Error::InvalidInput("order overflows u64".into()))
}

/// Matrices (a *; 0 b) over Z/p^k with a, b in the given unit subgroups and * arbitrary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorelSpec {
    pub p: u64,
    pub k: u32,
    pub a_range: Vec<u64>,
    pub b_range: Vec<u64>,
}

impl BorelSpec {
    pub fn new(p: u64, k: u32, a_range: Vec<u64>, b_range: Vec<u64>) -> Result<BorelSpec> {
        let m = p.pow(k);
        let norm = |mut v: Vec<u64>| {
            v.iter_mut().for_each(|x| *x %= m);
            v.sort_unstable();
            v.dedup();
            v
        };
        let (a_range, b_range) = (norm(a_range), norm(b_range));
        if !is_prime(p) || !is_subgroup(m, &a_range) || !is_subgroup(m, &b_range) {
            return Err(Error::InvalidInput("ranges must be subgroups of (Z/p^k)^x".into()));
        }
        Ok(BorelSpec { p, k, a_range, b_range })
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// The bound group of the order-25 argument: a any unit, b in <7>.
    pub fn order_25_bound() -> BorelSpec {
        let units: Vec<u64> = (1..25).filter(|a| a % 5 != 0).collect();
        BorelSpec::new(5, 2, units, subgroup_generated(25, &[7])).expect("valid spec")
    }
}

pub fn borel_order(spec: &BorelSpec) -> u64 {
    spec.a_range.len() as u64 * spec.b_range.len() as u64 * spec.modulus()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexCheck {
    pub index: u64,
    /// (d, d divides the index) for d = p^k and d = 150.
    pub divisibility: Vec<(u64, bool)>,
}

/// Index of the Borel-type group in GL2(Z/p^k) and the divisibilities used against
/// Greenberg's bound.
pub fn greenberg_index_check(spec: &BorelSpec) -> Result<IndexCheck> {
    let g = gl2_order(spec.p, spec.k)?;
    let b = borel_order(spec);
    if g % b != 0 {
        return Err(Error::InvalidInput(format!("{b} does not divide {g}")));
    }
    let index = g / b;
    let divisibility = [spec.modulus(), 150].iter().map(|&d| (d, index.is_multiple_of(d))).collect();
    Ok(IndexCheck { index, divisibility })
}

/// Order of g in (Z/m)^x and the elements of <g>.
pub fn subgroup_order_cyclic(m: u64, g: u64) -> Result<(u64, Vec<u64>)> {
    if m < 2 || gcd_u64(g % m, m) != 1 {
        return Err(Error::InvalidInput(format!("{g} is not a unit mod {m}")));
    }
    let mut elems = vec![1 % m];
    let mut x = g % m;
    while x != 1 % m {
        elems.push(x);
        x = mul_mod(x, g, m);
    }
    elems.sort_unstable();
    Ok((elems.len() as u64, elems))
}

/// Brute-force |GL2(Z/m)|.
pub fn gl2_order_enumerated(m: u64) -> u64 {
    let mut n = 0;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let det = (a * d + m * m - b * c % m) % m;
                    if gcd_u64(det, m) == 1 {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

/// Brute-force count of all 2x2 matrices mod p^k lying in the Borel-type group.
pub fn borel_order_enumerated(spec: &BorelSpec) -> u64 {
    let m = spec.modulus();
    let mut n = 0;
    for a in 0..m {
        for x in 0..m {
            for c in 0..m {
                for b in 0..m {
                    let _ = x;
                    if c == 0 && spec.a_range.binary_search(&a).is_ok() && spec.b_range.binary_search(&b).is_ok() {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(gl2_order(2, 1).unwrap(), 6);
        assert_eq!(gl2_order(5, 1).unwrap(), 480);
        assert_eq!(gl2_order_enumerated(5), 480);
        assert_eq!(gl2_order_enumerated(4), gl2_order(2, 2).unwrap());
    }

    #[test]
    fn order_25_index() {
        let s = BorelSpec::order_25_bound();
        assert_eq!(borel_order(&s), 2000);
        let c = greenberg_index_check(&s).unwrap();
        assert_eq!(c.index, 150);
        assert!(c.divisibility.iter().all(|&(_, ok)| ok));
        let unip = BorelSpec::new(5, 2, vec![1], vec![1]).unwrap();
        assert_eq!(borel_order(&unip), 25);
        let full = BorelSpec::new(5, 1, vec![1, 2, 3, 4], vec![1, 2, 3, 4]).unwrap();
        assert_eq!(borel_order(&full), 80);
        assert_eq!(borel_order_enumerated(&full), 80);
        assert!(BorelSpec::new(5, 2, vec![1, 2], vec![1]).is_err());
    }

    #[test]
    fn cyclic_subgroups() {
        assert_eq!(subgroup_order_cyclic(25, 7).unwrap(), (4, vec![1, 7, 18, 24]));
        assert_eq!(subgroup_order_cyclic(25, 1).unwrap().0, 1);
        assert_eq!(subgroup_order_cyclic(9, 2).unwrap().0, 6);
        assert!(subgroup_order_cyclic(25, 5).is_err());
    }
}
