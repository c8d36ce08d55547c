//! Search for completely split primes.

use super::fieldspec::{split_condition, FieldSpec};
use crate::arith::primes::is_prime;
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Default upper limit on the prime search.
pub const SPLIT_SEARCH_CAP: u64 = 10_000_000;

/// The `count` smallest primes splitting completely in `field` and not in `excluded`.
pub fn find_split_primes(field: &FieldSpec, count: usize, excluded: &BTreeSet<u64>) -> Result<Vec<u64>> {
    find_split_primes_after(field, count, excluded, 0, SPLIT_SEARCH_CAP)
}

/// As `find_split_primes`, restricted to primes greater than `after` and at most `cap`.
pub fn find_split_primes_after(
    field: &FieldSpec,
    count: usize,
    excluded: &BTreeSet<u64>,
    after: u64,
    cap: u64,
) -> Result<Vec<u64>> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    let cond = split_condition(field)?;
    let m = cond.modulus;
    let residues: Vec<u64> = if m == 1 { vec![0] } else { cond.residues.iter().copied().collect() };
    let mut out = Vec::with_capacity(count);
    let mut k = after / m;
    loop {
        for &r in &residues {
            let q = r + k * m;
            if q > cap {
                return Err(Error::SearchBound(format!(
                    "found {} of {count} split primes for {field} below {cap}",
                    out.len()
                )));
            }
            if q > after && is_prime(q) && !excluded.contains(&q) && cond.holds(q) {
                out.push(q);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes::primes_up_to;

    #[test]
    fn smallest_split_primes() {
        let none = BTreeSet::new();
        assert_eq!(find_split_primes(&FieldSpec::Layer { p: 5, n: 1 }, 1, &none).unwrap(), vec![7]);
        assert_eq!(find_split_primes(&FieldSpec::Cyclo { p: 2, k: 5 }, 1, &none).unwrap(), vec![97]);
        assert_eq!(find_split_primes(&FieldSpec::Layer { p: 3, n: 4 }, 1, &none).unwrap(), vec![487]);
        let ex: BTreeSet<u64> = [2, 3].into();
        assert_eq!(find_split_primes(&FieldSpec::rationals(), 3, &ex).unwrap(), vec![5, 7, 11]);
    }

    #[test]
    fn excluded_and_sieve_oracle() {
        let ex: BTreeSet<u64> = [97].into();
        let got = find_split_primes(&FieldSpec::Cyclo { p: 2, k: 5 }, 2, &ex).unwrap();
        let want: Vec<u64> = primes_up_to(2000).into_iter().filter(|q| q % 32 == 1 && *q != 97).take(2).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn cap_is_an_error() {
        let r = find_split_primes_after(&FieldSpec::Layer { p: 3, n: 4 }, 5, &BTreeSet::new(), 0, 1000);
        assert!(matches!(r, Err(Error::SearchBound(_))));
    }
}
