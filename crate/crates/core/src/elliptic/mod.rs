//! Elliptic curves over Q: models, division polynomials, point arithmetic and rational torsion.

pub mod curve;
pub mod divpoly;
pub mod point;
pub mod torsion;

pub use curve::{rat_mod, Curve, CurveRecord, ShortModel};
pub use divpoly::{division_poly, primitive_prime_power_int, primitive_prime_power_mod, x_division_int, x_division_mod, DivisionPoly, DivisionPolyData};
pub use point::{count_points, enumerate_over_fq, CurveOver, Fq, Point, Scalar};
pub use torsion::{normalise, torsion_over_q, TorsionGroup, TorsionOverQ};
