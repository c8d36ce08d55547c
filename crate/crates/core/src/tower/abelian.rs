//! Exact roots of rational polynomials in finite abelian fields, and the torsion they carry.
//!
//! For an irreducible g and a field F = Q(zeta_M)^{H_F}, a root alpha in F generates
//! Q(zeta_M)^{H_alpha} with H_F <= H_alpha of index deg g, and a prime q not dividing M or
//! disc g has g mod q with a root exactly when q mod M lies in H_alpha. One prime per coset
//! of H_F recovers the candidate H_alpha; roots are then found exactly in that subfield.

use super::fieldspec::{intermediate_subgroups, reduce_conductor, FieldSpec};
use crate::arith::primes::{gcd_u64, is_prime, mul_mod};
use crate::arith::{factor_over_q, FactorConfig, IntPoly, RationalPoly, Scalar};
use crate::cyclo::{coset_reps, is_subgroup, roots_in_number_field, sqrt_in_field, units_mod, CycloField, NfElem, Subfield};
use crate::elliptic::curve::Curve;
use crate::elliptic::divpoly::primitive_prime_power_int;
use crate::elliptic::point::{CurveOver, Point};
use crate::elliptic::torsion::TorsionGroup;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Largest norm degree handed to exact root finding.
pub const DEFAULT_DEGREE_BUDGET: usize = 2000;

/// A finite abelian field with its presentation.
#[derive(Clone, Debug)]
pub struct AbelianField {
    pub spec: FieldSpec,
    pub conductor: u64,
    pub group: Vec<u64>,
}

impl AbelianField {
    pub fn new(spec: &FieldSpec) -> Result<AbelianField> {
        let (m, h) = spec.abelian_data()?;
        let (conductor, group) = reduce_conductor(m, &h);
        Ok(AbelianField { spec: spec.clone(), conductor, group })
    }

    pub fn degree(&self) -> usize {
        if self.conductor == 1 {
            1
        } else {
            units_mod(self.conductor).len() / self.group.len()
        }
    }
}

/// A subfield of F carrying exact elements, built on its smallest conductor.
pub struct ExactSubfield {
    pub conductor: u64,
    pub group: Vec<u64>,
    pub sub: Option<Subfield>,
}

impl ExactSubfield {
    fn new(m: u64, h: &[u64]) -> Result<ExactSubfield> {
        let (conductor, group) = reduce_conductor(m, h);
        let sub = if conductor == 1 { None } else { Some(Subfield::new(CycloField::new(conductor), &group)?) };
        Ok(ExactSubfield { conductor, group, sub })
    }

    pub fn degree(&self) -> usize {
        self.sub.as_ref().map_or(1, |s| s.degree())
    }

    /// Defining polynomial of the presented field (x for Q).
    pub fn minpoly(&self) -> RationalPoly {
        self.sub.as_ref().map_or(RationalPoly::x(), |s| s.minpoly.clone())
    }

    fn number_field(&self) -> Arc<crate::cyclo::NumberField> {
        match &self.sub {
            Some(s) => s.field.clone(),
            None => crate::cyclo::NumberField::new(RationalPoly::x(), "Q"),
        }
    }

    /// Coordinates of an element in Q(zeta_conductor).
    pub fn ambient_coords(&self, a: &NfElem) -> Vec<num_rational::BigRational> {
        match &self.sub {
            Some(s) => s.to_ambient(a).coords(),
            None => vec![a.poly().coeff(0)],
        }
    }
}

impl std::fmt::Debug for ExactSubfield {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Q(zeta_{})^{:?}", self.conductor, self.group)
    }
}

fn squarefree_mod(g: &IntPoly, q: u64) -> bool {
    let r = g.mod_p(q);
    if r.degree() != Some(g.deg()) {
        return false;
    }
    let d = r.derivative();
    !d.is_zero() && r.gcd(&d).degree() == Some(0)
}

/// Candidate fixing group of the field generated by a root of the irreducible g inside F,
/// or None when the Frobenius data already rule out a root in F.
pub fn root_field_group(g: &IntPoly, f: &AbelianField) -> Result<Option<Vec<u64>>> {
    let e = g.deg();
    if e == 0 {
        return Err(Error::InvalidInput("constant polynomial".into()));
    }
    if !f.degree().is_multiple_of(e) {
        return Ok(None);
    }
    let m = f.conductor;
    if m == 1 {
        return Ok(if e == 1 { Some(vec![0]) } else { None });
    }
    let lc = g.lead();
    let mut hit: BTreeSet<u64> = BTreeSet::new();
    for c in coset_reps(m, &f.group) {
        let mut k = 0u64;
        let q = loop {
            let q = c + k * m;
            k += 1;
            if q > 5 && is_prime(q) && !(&lc % BigInt::from(q)).is_zero() && squarefree_mod(g, q) {
                break q;
            }
            if k > 1_000_000 {
                return Err(Error::SearchBound(format!("no good prime in class {c} mod {m}")));
            }
        };
        if g.mod_p(q).count_roots()? > 0 {
            hit.extend(f.group.iter().map(|&h| mul_mod(c, h, m)));
        }
    }
    let h: Vec<u64> = hit.into_iter().collect();
    let index = units_mod(m).len() / h.len().max(1);
    if h.is_empty() || !is_subgroup(m, &h) || index != e || h.len() * e != units_mod(m).len() {
        return Ok(None);
    }
    Ok(Some(h))
}

/// Roots of an irreducible g lying in F, with the subfield Q(root) they live in.
pub fn irreducible_roots_in_field(
    g: &RationalPoly,
    f: &AbelianField,
    cfg: &FactorConfig,
    budget: usize,
) -> Result<Option<(Arc<ExactSubfield>, Vec<NfElem>)>> {
    let (_, ig) = g.to_int_parts();
    let Some(h) = root_field_group(&ig, f)? else {
        return Ok(None);
    };
    let e = ig.deg();
    if e * e > budget {
        return Err(Error::Indeterminate(format!("root field of degree {e} exceeds the degree budget")));
    }
    let l = Arc::new(ExactSubfield::new(f.conductor, &h)?);
    let roots = roots_in_number_field(g, &l.number_field(), cfg)?;
    if roots.is_empty() {
        return Ok(None);
    }
    Ok(Some((l, roots)))
}

/// Where the y-coordinate of a point with given x lives.
#[derive(Clone, Debug)]
pub enum YStatus {
    /// 2-torsion: y = 0.
    Zero,
    /// y^2 = D has a root in the given subfield of F; x and y are both elements of it.
    InField { field: Arc<ExactSubfield>, x: NfElem, y: NfElem },
    /// x is in F but y is only in a quadratic extension of F.
    QuadraticObstruction,
}

impl YStatus {
    pub fn points_per_x(&self) -> usize {
        match self {
            YStatus::Zero => 1,
            YStatus::InField { .. } => 2,
            YStatus::QuadraticObstruction => 0,
        }
    }
}

/// Decides whether d, an element of the subfield l of F, is a square in F: first in l,
/// then in each quadratic extension of l inside F. `x` is carried along into the field
/// where the square root is found.
pub fn square_root_in_field(
    d: &NfElem,
    x: &NfElem,
    l: &Arc<ExactSubfield>,
    f: &AbelianField,
    cfg: &FactorConfig,
) -> Result<YStatus> {
    if d.is_zero_elem() {
        return Ok(YStatus::Zero);
    }
    if let Some(y) = sqrt_in_field(d, cfg)? {
        return Ok(YStatus::InField { field: l.clone(), x: x.clone(), y });
    }
    // Lift l's group back to the conductor of F.
    let m = f.conductor;
    let hl: Vec<u64> = units_mod(m).into_iter().filter(|c| l.group.contains(&(c % l.conductor.max(1)))).collect();
    let hl = if l.conductor == 1 { units_mod(m) } else { hl };
    let base = CycloField::new(l.conductor.max(1));
    let to_amb = |a: &NfElem| match &l.sub {
        Some(s) => s.to_ambient(a),
        None => base.from_coords(vec![a.poly().coeff(0)]),
    };
    let amb_d = to_amb(d);
    for h2 in intermediate_subgroups(m, &hl, &f.group, 2) {
        let l2 = Arc::new(ExactSubfield::new(m, &h2)?);
        let Some(s2) = &l2.sub else { continue };
        let lifted = s2.ambient.embed_from(&base, &amb_d)?;
        let Some(d2) = s2.from_ambient(&lifted) else {
            return Err(Error::InvalidInput("subfield embedding failed".into()));
        };
        if let Some(y) = sqrt_in_field(&d2, cfg)? {
            let x2 = s2
                .from_ambient(&s2.ambient.embed_from(&base, &to_amb(x))?)
                .ok_or_else(|| Error::InvalidInput("subfield embedding failed".into()))?;
            return Ok(YStatus::InField { field: l2.clone(), x: x2, y });
        }
    }
    Ok(YStatus::QuadraticObstruction)
}

/// An exact point of exact order l^k with x (in short coordinates X) in F.
#[derive(Clone, Debug)]
pub struct FieldPoint {
    pub order: u64,
    pub x_field: Arc<ExactSubfield>,
    /// Minimal polynomial over Q of X.
    pub x_minpoly: RationalPoly,
    pub x: NfElem,
    pub y: YStatus,
}

impl FieldPoint {
    /// Exact check with the group law on the short model: the point has exactly the
    /// claimed order. False when y is not in F.
    pub fn verify_order(&self, e: &Curve) -> bool {
        let YStatus::InField { x, y, .. } = &self.y else {
            return matches!(self.y, YStatus::Zero) && self.order == 2;
        };
        let m = e.short_model();
        let c = |v: &BigInt| x.from_rat(&rat_from(v)).unwrap();
        let curve = CurveOver { a: [x.zero_like(), x.zero_like(), x.zero_like(), c(&m.a), c(&m.b)] };
        let p = Point::Affine(x.clone(), y.clone());
        curve.contains(&p) && curve.order(&p, self.order) == Some(self.order)
    }
}

/// Count of points of exact order l^k (k >= 1) over F, with one witness per
/// Galois orbit that carries points.
#[derive(Clone, Debug)]
pub struct ExactOrderCount {
    pub order: u64,
    pub points: usize,
    pub witnesses: Vec<FieldPoint>,
    /// Orbits with x in F but y outside F.
    pub obstructed: Vec<FieldPoint>,
}

/// Points of exact order l^k over F, found from the primitive division polynomial.
pub fn exact_order_points(
    e: &Curve,
    l: u64,
    k: u32,
    f: &AbelianField,
    cfg: &FactorConfig,
    budget: usize,
) -> Result<ExactOrderCount> {
    let model = e.short_model();
    let g = primitive_prime_power_int(&model.a, &model.b, l as usize, k);
    let n = f.degree();
    let fac = factor_over_q(&RationalPoly::from_int_poly(&g), &FactorConfig { degree_cap: Some(n), ..cfg.clone() })?;
    let a = rat_from(&model.a);
    let b = rat_from(&model.b);
    let mut out = ExactOrderCount { order: l.pow(k), points: 0, witnesses: Vec::new(), obstructed: Vec::new() };
    for (h, _) in fac.factors.iter().filter(|(h, _)| n.is_multiple_of(h.deg())) {
        cfg.check_deadline()?;
        let Some((lf, roots)) = irreducible_roots_in_field(h, f, cfg, budget)? else {
            continue;
        };
        let x = roots[0].clone();
        let d = x.mul(&x).mul(&x).add(&x.mul(&x.from_rat(&a).unwrap())).add(&x.from_rat(&b).unwrap());
        let y = square_root_in_field(&d, &x, &lf, f, cfg)?;
        let pt = FieldPoint { order: l.pow(k), x_field: lf, x_minpoly: h.clone(), x, y };
        let per = pt.y.points_per_x();
        out.points += per * h.deg();
        if per == 0 {
            out.obstructed.push(pt);
        } else {
            out.witnesses.push(pt);
        }
    }
    Ok(out)
}

fn rat_from(a: &BigInt) -> num_rational::BigRational {
    num_rational::BigRational::from_integer(a.clone())
}

/// The l-primary part of E(F), from the counts #E(F)[l^j].
#[derive(Clone, Debug)]
pub struct PrimaryPart {
    pub l: u64,
    /// counts[j] = #E(F)[l^j].
    pub counts: Vec<u64>,
    pub group: TorsionGroup,
    pub levels: Vec<ExactOrderCount>,
}

/// The l-primary torsion of E over F. Stops at the first level adding no points, or at
/// `max_k` (then the answer is a lower bound and the caller is told via Indeterminate).
pub fn primary_part(
    e: &Curve,
    l: u64,
    f: &AbelianField,
    max_k: u32,
    cfg: &FactorConfig,
    budget: usize,
) -> Result<PrimaryPart> {
    let mut counts = vec![1u64];
    let mut levels = Vec::new();
    for k in 1..=max_k {
        let c = exact_order_points(e, l, k, f, cfg, budget)?;
        let total = counts[k as usize - 1] + c.points as u64;
        levels.push(c);
        if total == counts[k as usize - 1] {
            break;
        }
        counts.push(total);
        if k == max_k {
            return Err(Error::Indeterminate(format!("{l}-power torsion still growing at level {max_k}")));
        }
    }
    let group = TorsionGroup::from_counts(l, &counts);
    Ok(PrimaryPart { l, counts, group, levels })
}

/// gcd of #E(F_q) over split primes q of good reduction. Split primes are unramified and
/// q >= 5, so reduction is injective on E(F)_tors, whose order therefore divides the gcd.
pub fn split_prime_order_bound(e: &Curve, f: &AbelianField, count: usize) -> Result<u64> {
    let mut excluded: BTreeSet<u64> = [2, 3].into();
    excluded.extend(e.bad_primes().ok_or_else(|| Error::Unsupported("cannot factor discriminant".into()))?);
    let mut g = 0u64;
    for q in super::split::find_split_primes(&f.spec, count, &excluded)? {
        g = gcd_u64(g, crate::elliptic::point::count_points(e, q)?);
    }
    Ok(g)
}
