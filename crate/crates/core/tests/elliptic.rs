use num_bigint::BigInt;
use num_rational::BigRational;
use ttower_core::arith::rat;
use ttower_core::elliptic::divpoly::{short_mod, x_division_degree};
use ttower_core::elliptic::torsion::lutz_nagell_torsion;
use ttower_core::elliptic::*;

fn curve(a: [i64; 5]) -> Curve {
    Curve::from_i64(a).unwrap()
}

const TABLE: &[([i64; 5], u64, u64)] = &[
    ([0, 0, 1, -1, 0], 1, 1),
    ([0, -1, 1, -7820, -263580], 1, 1),
    ([0, 1, 0, -36, -140], 1, 2),
    ([0, 0, 0, -11, -14], 1, 2),
    ([1, 0, 1, -10, 8], 1, 2),
    ([0, 0, 1, 0, 0], 1, 3),
    ([0, 0, 1, 0, -7], 1, 3),
    ([0, 1, 1, -9, -15], 1, 3),
    ([0, 1, 1, 1, 0], 1, 3),
    ([1, -1, 1, -1, -14], 1, 4),
    ([1, 1, 1, -80, 242], 1, 4),
    ([0, 0, 0, 4, 0], 1, 4),
    ([0, -1, 1, -10, -20], 1, 5),
    ([0, -1, 1, 0, 0], 1, 5),
    ([1, 0, 1, 4, -6], 1, 6),
    ([0, 1, 0, 4, 4], 1, 6),
    ([0, 1, 0, -1, 0], 1, 6),
    ([1, -1, 1, -3, 3], 1, 7),
    ([1, 1, 1, 35, -28], 1, 8),
    ([1, -1, 1, -14, 29], 1, 9),
    ([1, -1, 1, -122, 1721], 1, 12),
    ([1, 1, 1, -135, -660], 2, 2),
    ([0, 0, 0, -1, 0], 2, 2),
    ([1, 1, 1, -10, -10], 2, 4),
    ([1, 1, 1, -5, 2], 2, 4),
    ([0, -1, 0, -4, 4], 2, 4),
    ([1, 0, 1, -19, 26], 2, 6),
    ([1, 0, 0, -1070, 7812], 2, 8),
];

#[test]
fn rational_torsion_matches_tables_and_lutz_nagell() {
    for &(a, m, n) in TABLE {
        let e = curve(a);
        let t = torsion_over_q(&e).unwrap();
        assert_eq!(t.group, TorsionGroup { m, n }, "{a:?}");
        assert_eq!(lutz_nagell_torsion(&e), Some(t.group), "{a:?}");
    }
}

#[test]
fn kubert_ten_torsion() {
    let e = curve([-5, -24, -24, 0, 0]);
    assert_eq!(torsion_over_q(&e).unwrap().group, TorsionGroup::cyclic(10));
}

#[test]
fn degree_of_psi_11() {
    let e = curve([0, -1, 1, -10, -20]);
    let d = division_poly(&e, 11, None).unwrap();
    assert_eq!(d.degree(), 60);
    assert_eq!(x_division_degree(11), 60);
}

#[test]
fn root_counts_agree_with_point_enumeration() {
    // Roots of X_n mod q are the x-coordinates of nonzero points of E(F_q-bar)[n];
    // over F_q their count must match the abscissae of F_q-points of order dividing n
    // (plus x-roots whose points live over F_q2, which a point count cannot see).
    let e = curve([1, 1, 1, -30, -76]);
    let model = e.short_model();
    for q in [13u64, 17, 29, 37, 41] {
        if !e.has_good_reduction(q) {
            continue;
        }
        let pts = enumerate_over_fq(&e, q).unwrap();
        let c = CurveOver::from_curve(&e, &Fq::new(0, q)).unwrap();
        let (a, b) = short_mod(&model, q);
        for n in [2usize, 3, 4, 5] {
            let xs: std::collections::BTreeSet<u64> = pts
                .iter()
                .filter(|p| !p.is_infinity() && c.mul(n as i64, p).is_infinity())
                .map(|p| match p {
                    Point::Affine(x, _) => x.v,
                    _ => unreachable!(),
                })
                .collect();
            let f = x_division_mod(a, b, n, q);
            let roots = f.roots().unwrap();
            // Every F_q-point gives a root, mapped through X = alpha x + beta.
            let al = rat_mod(&model.alpha, q).unwrap();
            let be = rat_mod(&model.beta, q).unwrap();
            for x in &xs {
                let big_x = (al as u128 * *x as u128 + be as u128) % q as u128;
                assert!(roots.contains(&(big_x as u64)), "q={q} n={n}");
            }
            assert!(xs.len() <= roots.len());
        }
    }
}

#[test]
fn hasse_bound_holds() {
    let e = curve([0, 0, 1, -38, 90]);
    for q in [5u64, 7, 11, 13, 101, 1009, 10007] {
        if !e.has_good_reduction(q) {
            continue;
        }
        let n = count_points(&e, q).unwrap() as f64;
        assert!((n - q as f64 - 1.0).abs() <= 2.0 * (q as f64).sqrt());
    }
}

#[test]
fn twist_preserves_division_degree_and_j() {
    let e = curve([0, 0, 1, -38, 90]);
    for d in [-1i64, 2, -3, 5] {
        let t = e.quadratic_twist(d).unwrap();
        assert_eq!(t.j_invariant(), e.j_invariant());
        let x = |c: &Curve| division_poly(c, 7, None).unwrap().degree();
        assert_eq!(x(&t), x(&e));
        let s = e.short_coefficients();
        let st = t.short_coefficients();
        assert_eq!(st.0, s.0 * rat(d * d));
        assert_eq!(st.1, s.1 * rat(d * d * d));
    }
}

#[test]
fn twist_scales_division_polynomial_roots() {
    // (A, B) -> (A d^2, B d^3) sends X to d X, so X_n^twist(d X) = d^deg X_n(X).
    let (a, b) = (BigInt::from(-38), BigInt::from(90));
    for d in [-1i64, 2, -3] {
        let db = BigInt::from(d);
        let at = &a * &db * &db;
        let bt = &b * &db * &db * &db;
        for n in [3usize, 4, 5, 6] {
            let f = x_division_int(&a, &b, n);
            let g = x_division_int(&at, &bt, n).compose_affine(&db, &BigInt::from(0));
            assert_eq!(g, f.scale(&num_traits::pow(db.clone(), f.deg())), "d={d} n={n}");
        }
    }
}

#[test]
fn division_poly_in_curve_coordinates_vanishes_on_torsion() {
    // 11a3 has (0,0) of order 5.
    let e = curve([0, -1, 1, 0, 0]);
    let f = division_poly(&e, 5, None).unwrap().in_curve_coordinates().unwrap();
    assert_eq!(f.eval(&rat(0)), BigRational::from_integer(BigInt::from(0)));
    assert_eq!(f.lead(), rat(5));
}
