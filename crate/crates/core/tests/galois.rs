use ttower_core::cyclo::subgroup_generated;
use ttower_core::galois::*;

#[test]
fn gl2_mod_25_by_enumeration() {
    assert_eq!(gl2_order(5, 2).unwrap(), 300_000);
    assert_eq!(gl2_order_enumerated(25), 300_000);
    assert_eq!(gl2_order_enumerated(9), gl2_order(3, 2).unwrap());
    assert_eq!(gl2_order_enumerated(7), gl2_order(7, 1).unwrap());
}

#[test]
fn order_25_bound_group() {
    let s = BorelSpec::order_25_bound();
    assert_eq!(s.b_range, vec![1, 7, 18, 24]);
    assert_eq!(s.a_range.len(), 20);
    assert_eq!(borel_order(&s), 2000);
    assert_eq!(borel_order_enumerated(&s), 2000);
    let c = greenberg_index_check(&s).unwrap();
    assert_eq!(c.index, 150);
    assert_eq!(c.divisibility, vec![(25, true), (150, true)]);
}

#[test]
fn borel_orders_match_enumeration() {
    for (p, k) in [(3u64, 1u32), (5, 1), (3, 2), (7, 1)] {
        let m = p.pow(k);
        let units: Vec<u64> = (1..m).filter(|a| a % p != 0).collect();
        for b in [vec![1], units.clone(), subgroup_generated(m, &[m - 1])] {
            let s = BorelSpec::new(p, k, units.clone(), b).unwrap();
            assert_eq!(borel_order(&s), borel_order_enumerated(&s), "{p}^{k}");
            let c = greenberg_index_check(&s).unwrap();
            assert_eq!(c.index * borel_order(&s), gl2_order(p, k).unwrap());
        }
    }
}

#[test]
fn cyclic_subgroups_of_units() {
    let (n, e) = subgroup_order_cyclic(25, 7).unwrap();
    assert_eq!(n, 4);
    assert_eq!(e, subgroup_generated(25, &[7]));
    assert_eq!(subgroup_order_cyclic(25, 2).unwrap().0, 20);
}
