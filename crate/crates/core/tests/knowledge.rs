use ttower_core::arith::parse_rational;
use ttower_core::arith::primes::{euler_phi, factorize, is_prime};
use ttower_core::elliptic::Curve;
use ttower_core::knowledge::*;

fn tables() -> KnowledgeTables {
    KnowledgeTables::builtin()
}

#[test]
fn admissible_orders_are_chains_of_isogeny_degrees() {
    let t = tables();
    for &m in &t.admissible_prime_power_orders {
        let f = factorize(m);
        assert_eq!(f.len(), 1, "{m} is not a prime power");
        let (p, k) = f[0];
        // A point of order 32 only forces a rational 16-isogeny (through Z/2 x Z/32).
        let top = if m == 32 { k - 1 } else { k };
        for j in 1..=top {
            assert!(t.isogeny_degree_allowed(p.pow(j)), "{m}");
        }
    }
    for m in [23, 29, 31, 41, 47, 49, 53, 59, 64, 81, 121, 125, 169] {
        assert!(!t.admissible_prime_power_order(m), "{m}");
    }
}

#[test]
fn phi_table_against_a_naive_count() {
    let t = tables();
    for (&n, &v) in &t.phi_table {
        let naive = (1..=n).filter(|&a| num_integer::gcd(a, n) == 1).count() as u64;
        assert_eq!(v, naive, "{n}");
        assert_eq!(t.phi(n), Some(euler_phi(n)));
    }
    assert_eq!(t.phi(163), Some(162));
}

#[test]
fn degree_options() {
    let t = tables();
    let DegreeOptions::Exact(d7) = t.point_degree_options(7).unwrap() else { panic!() };
    assert!(d7.contains(&1) && d7.contains(&48) && !d7.contains(&5));
    assert!(!matches!(t.point_degree_options(13).unwrap(), DegreeOptions::Parametric { .. }));
    let DegreeOptions::Parametric { occurs, .. } = t.point_degree_options(43).unwrap() else { panic!() };
    assert!(occurs.contains(&(43 * 43 - 1)));
    assert!(t.point_degree_options(15).is_err());
}

#[test]
fn layer_bounds() {
    assert_eq!(layer_bound(13, 2), 2);
    assert_eq!(layer_bound(13, 3), 1);
    assert_eq!(layer_bound(27, 3), 2);
    assert_eq!(layer_bound(163, 3), 4);
    assert_eq!(layer_bound(11, 5), 1);
    assert_eq!(layer_bound(11, 7), 0);
}

#[test]
fn full_torsion_filters() {
    let t = tables();
    assert!(t.full_torsion_allowed(2, FullTorsionContext::TotallyReal));
    assert!(!t.full_torsion_allowed(3, FullTorsionContext::TotallyReal));
    assert!(t.full_torsion_allowed(5, FullTorsionContext::Abelian));
    assert!(!t.full_torsion_allowed(7, FullTorsionContext::Abelian));
    assert!(t.full_torsion_allowed(5, FullTorsionContext::Cyclotomic));
    assert!(!t.full_torsion_allowed(6, FullTorsionContext::Cyclotomic));
}

// The thirteen CM j-invariants against the class-number-one discriminants, via
// j = (1728 or 0) and the classical values from Weber's functions recomputed here.
#[test]
fn cm_j_values_are_the_class_number_one_list() {
    let t = tables();
    let js = t.cm_j_values().unwrap();
    let expect: Vec<i64> = vec![
        0,
        1728,
        -3375,
        8000,
        -32768,
        54000,
        287496,
        -884736,
        -12288000,
        16581375,
        -884736000,
        -147197952000,
        -262537412640768000,
    ];
    let mut got: Vec<String> = js.iter().map(|j| j.to_string()).collect();
    let mut want: Vec<String> = expect.iter().map(|j| j.to_string()).collect();
    got.sort();
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn tabulated_curves_have_the_tabulated_j() {
    let t = tables();
    for (p, rows) in &t.cm_isogeny_rows {
        assert!(is_prime(*p));
        for r in rows {
            let e = Curve::from_j(&r.value().unwrap());
            assert_eq!(e.j_invariant(), r.value().unwrap(), "{}", r.label);
        }
    }
    let j = parse_rational("-297756989/2").unwrap();
    assert_eq!(t.seventeen_isogeny_j[0].value().unwrap(), j);
    // -17^2 101^3 / 2 and -17 373^3 / 2^17.
    assert_eq!(j, parse_rational(&format!("-{}/2", 289u64 * 101u64.pow(3))).unwrap());
    let j2 = parse_rational(&format!("-{}/{}", 17u64 * 373u64.pow(3), 1u64 << 17)).unwrap();
    assert_eq!(t.seventeen_isogeny_j[1].value().unwrap(), j2);
}

#[test]
fn checksum_is_stable_and_tamper_evident() {
    let a = KnowledgeTables::builtin_sha256();
    assert_eq!(a.len(), 64);
    assert_eq!(a, KnowledgeTables::builtin_sha256());
    let doc = include_str!("../fixtures/tables.json");
    let changed = doc.replacen("\"-32768\"", "\"-32769\"", 1);
    assert_ne!(doc, changed);
    assert!(KnowledgeTables::from_json(&changed).is_err());
}
