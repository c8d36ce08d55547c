use std::collections::BTreeSet;
use ttower_core::arith::primes::primes_up_to;
use ttower_core::arith::{factor_over_q, FactorConfig, RationalPoly};
use ttower_core::cyclo::{CycloField, Subfield};
use ttower_core::elliptic::{Curve, TorsionGroup};
use ttower_core::knowledge::KnowledgeTables;
use ttower_core::tower::*;

fn curve(a: [i64; 5]) -> Curve {
    Curve::from_i64(a).unwrap()
}

fn spec(s: &str) -> FieldSpec {
    s.parse().unwrap()
}

fn exact_roots(f: &RationalPoly, field: &FieldSpec) -> usize {
    let af = AbelianField::new(field).unwrap();
    let fac = factor_over_q(f, &FactorConfig::default()).unwrap();
    let mut n = 0;
    for (h, _) in &fac.factors {
        if let Some((_, r)) = irreducible_roots_in_field(h, &af, &FactorConfig::default(), DEFAULT_DEGREE_BUDGET).unwrap() {
            n += r.len();
        }
    }
    n
}

fn certified(f: &RationalPoly, field: &FieldSpec) -> bool {
    let out = certify_no_root(&PolyRecipe::explicit(f), None, field, &BTreeSet::new(), &CertifyConfig::default()).unwrap();
    matches!(out, CertifyOutcome::Certified(_))
}

#[test]
fn certificates_agree_with_exact_roots() {
    let cases = [
        (RationalPoly::from_i64(&[-2, 0, 1]), "LAYER(2,1)"),
        (RationalPoly::from_i64(&[-2, 0, 1]), "LAYER(3,1)"),
        (RationalPoly::from_i64(&[-3, 0, 1]), "LAYER(2,2)"),
        (RationalPoly::from_i64(&[1, -3, 0, 1]), "LAYER(3,1)"),
        (RationalPoly::from_i64(&[1, -3, 0, 1]), "LAYER(5,1)"),
        (RationalPoly::from_i64(&[1, 1, 1]), "CYCLO(3,1)"),
        (RationalPoly::from_i64(&[1, 1, 1]), "CYCLO(2,3)"),
        (RationalPoly::from_i64(&[1, 0, 1]), "CYCLO(2,3)"),
    ];
    for (f, s) in cases {
        let field = spec(s);
        let roots = exact_roots(&f, &field);
        // A certificate is a proof of absence; roots found exactly forbid one.
        if certified(&f, &field) {
            assert_eq!(roots, 0, "{f} over {s}");
        } else {
            assert!(roots > 0, "{f} over {s}");
        }
    }
}

#[test]
fn root_likely_is_monotone_in_the_field() {
    let f = RationalPoly::from_i64(&[-2, 0, 1]);
    let chain = ["Q", "LAYER(2,1)", "LAYER(2,2)", "COMPOSITUM(LAYER(2,2),LAYER(3,1))"];
    let outcomes: Vec<bool> = chain.iter().map(|s| certified(&f, &spec(s))).collect();
    assert_eq!(outcomes, [true, false, false, false]);
    let e = curve([1, 1, 1, -30, -76]);
    let psi = PolyRecipe::division(&e, 11);
    let none = BTreeSet::new();
    for s in ["Q", "LAYER(5,1)"] {
        let out = certify_no_root(&psi, Some("121a1"), &spec(s), &none, &CertifyConfig::default()).unwrap();
        assert!(out.certificate().is_some(), "{s}");
    }
}

#[test]
fn split_law_matches_factorisation_of_defining_polynomial() {
    for s in ["LAYER(5,1)", "LAYER(3,2)", "COMPOSITUM(LAYER(2,1),LAYER(3,1))", "CYCLO(2,4)", "CYCLOSUB(7,1,3)"] {
        let f = spec(s);
        let (m, h) = f.abelian_data().unwrap();
        let sub = Subfield::new(CycloField::new(m), &h).unwrap();
        let (_, g) = sub.minpoly.to_int_parts();
        let disc_free = |q: u64| g.mod_p(q).degree() == Some(g.deg()) && {
            let r = g.mod_p(q);
            r.gcd(&r.derivative()).degree() == Some(0)
        };
        let law = split_condition(&f).unwrap();
        for q in primes_up_to(2000).into_iter().filter(|&q| m % q != 0 && disc_free(q)) {
            let splits = g.mod_p(q).count_roots().unwrap() == g.deg();
            assert_eq!(law.holds(q), splits, "{s} at {q}");
        }
    }
}

#[test]
fn split_primes_are_split_and_increasing() {
    let f = spec("COMPOSITUM(LAYER(2,1),LAYER(3,4))");
    let qs = find_split_primes(&f, 5, &[2, 3].into()).unwrap();
    let law = split_condition(&f).unwrap();
    assert!(qs.windows(2).all(|w| w[0] < w[1]));
    assert!(qs.iter().all(|&q| law.holds(q)));
    assert_eq!(qs[0], 487);
}

#[test]
fn certificate_round_trip_and_recheck() {
    let e = curve([0, 0, 1, -38, 90]);
    let f = spec("COMPOSITUM(LAYER(2,1),LAYER(3,2))");
    let out = certify_no_root(&PolyRecipe::division(&e, 19), Some("361a1"), &f, &BTreeSet::new(), &CertifyConfig::default())
        .unwrap();
    let c = out.certificate().unwrap().clone();
    let back = NoRootCertificate::from_json(&c.to_json()).unwrap();
    assert_eq!(back, c);
    recheck(&back, Some(&e.ainvs_strings()), 3).unwrap();
    let other = curve([1, 1, 1, -30, -76]);
    assert!(recheck(&back, Some(&other.ainvs_strings()), 3).is_err());
    let mut bad = back.clone();
    bad.witnesses[0].q = 7;
    assert!(recheck(&bad, None, 3).is_err());
}

#[test]
fn order_thirteen_point_over_k() {
    let t = KnowledgeTables::builtin();
    let e = curve([0, 0, 0, 6, 8]).with_label("20736c1");
    let r = torsion_over_tower(&e, Tower::K, &t, &TorsionConfig::default()).unwrap();
    assert_eq!(r.over_q, TorsionGroup::trivial());
    assert_eq!(r.group, TorsionGroup::cyclic(13));
    assert!(r.consistent() && in_k_list(&r.group));
    let ev = r.evidence().find(|ev| ev.order == 13).unwrap();
    assert_eq!(ev.verdict, Verdict::Witness);
    assert_eq!(ev.points, 12);
    let Artifact::Point(p) = &ev.artifacts[0] else { panic!("no point") };
    assert!(p.verified && 12 % p.field_degree == 0);
    // The degree-6 field holds x but not y.
    let af = AbelianField::new(&spec("COMPOSITUM(LAYER(2,1),LAYER(3,1))")).unwrap();
    let c = exact_order_points(&e, 13, 1, &af, &FactorConfig::default(), DEFAULT_DEGREE_BUDGET).unwrap();
    assert_eq!((c.points, c.obstructed.len()), (0, 1));
}

#[test]
fn cyclotomic_levels_only_grow() {
    let t = KnowledgeTables::builtin();
    let e = curve([0, 0, 0, -11, 14]);
    let levels = cyclotomic_levels(&e, 2, 4, &t, &TorsionConfig::default()).unwrap();
    let groups: Vec<TorsionGroup> = levels.iter().map(|r| r.group).collect();
    for w in groups.windows(2) {
        assert!(w[1].order() % w[0].order() == 0 && w[1].n % w[0].n == 0);
    }
    assert_eq!(groups[3], TorsionGroup { m: 2, n: 8 });
    assert!(levels.iter().all(|r| r.consistent()));
}

#[test]
fn reduction_bound_is_a_multiple_of_known_torsion() {
    let e = curve([1, 0, 0, -1070, 7812]);
    for s in ["Q", "LAYER(2,1)", "CYCLO(3,1)"] {
        let (b, qs) = reduction_bound(&e, &spec(s), 8).unwrap();
        assert_eq!(b % 16, 0, "{s}");
        assert_eq!(qs.len(), 8);
    }
    let k = KnowledgeTables::builtin();
    assert_eq!(search_field(Tower::K, 13, &k).unwrap(), spec("COMPOSITUM(LAYER(2,2),LAYER(3,1))"));
    assert_eq!(search_field(Tower::K5, 11, &k).unwrap(), spec("LAYER(5,1)"));
    assert_eq!(search_field(Tower::Zp(3), 7, &k).unwrap(), spec("LAYER(3,1)"));
}
