use proptest::prelude::*;
use ttower_core::arith::{factor_over_q, FactorConfig, IntPoly, ModPoly, RationalPoly};

fn small_poly(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, 1..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn karatsuba_matches_schoolbook(a in small_poly(80), b in small_poly(80)) {
        let (a, b) = (IntPoly::from_i64(&a), IntPoly::from_i64(&b));
        prop_assert_eq!(a.mul(&b), a.schoolbook_mul(&b));
    }

    #[test]
    fn reduction_mod_q_is_a_ring_map(a in small_poly(60), b in small_poly(60), q in prop::sample::select(vec![2u64, 3, 101, 65537])) {
        let (a, b) = (IntPoly::from_i64(&a), IntPoly::from_i64(&b));
        prop_assert_eq!(a.mul(&b).mod_p(q), a.mod_p(q).mul_with_threshold(&b.mod_p(q), 4));
        prop_assert_eq!(a.mul(&b).mod_p(q), a.mod_p(q).mul(&b.mod_p(q)));
    }

    #[test]
    fn roots_mod_q_are_exactly_the_zeros(c in small_poly(12), q in prop::sample::select(vec![5u64, 7, 31, 97])) {
        let f = ModPoly::from_i64(q, &c);
        prop_assume!(!f.is_zero() && f.coeffs().len() > 1);
        let brute: Vec<u64> = (0..q).filter(|&x| f.eval(x) == 0).collect();
        let mut roots = f.roots().unwrap();
        roots.sort();
        roots.dedup();
        prop_assert_eq!(roots.len(), f.count_roots().unwrap());
        prop_assert_eq!(roots, brute);
    }

    #[test]
    fn factorization_multiplies_back(a in small_poly(5), b in small_poly(5), c in small_poly(4)) {
        let f = RationalPoly::from_i64(&a).mul(&RationalPoly::from_i64(&b)).mul(&RationalPoly::from_i64(&c));
        prop_assume!(f.deg() > 0);
        let fac = factor_over_q(&f, &FactorConfig::default()).unwrap();
        prop_assert!(fac.residual.is_empty());
        let mut g = RationalPoly::constant(fac.content.clone());
        for (h, e) in &fac.factors {
            g = g.mul(&h.pow(*e));
        }
        prop_assert_eq!(g, f);
    }
}

#[test]
fn cyclotomic_factors_over_q() {
    // x^12 - 1 = Phi1 Phi2 Phi3 Phi4 Phi6 Phi12.
    let mut c = vec![0i64; 13];
    c[0] = -1;
    c[12] = 1;
    let fac = factor_over_q(&RationalPoly::from_i64(&c), &FactorConfig::default()).unwrap();
    let mut degs: Vec<usize> = fac.factors.iter().map(|(h, _)| h.deg()).collect();
    degs.sort();
    assert_eq!(degs, vec![1, 1, 2, 2, 2, 4]);
}
