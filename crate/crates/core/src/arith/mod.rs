//! Exact integer, rational and prime-field polynomial arithmetic.

pub mod factor_q;
pub mod intpoly;
pub mod modpoly;
pub mod primes;
pub mod ratpoly;
pub mod resultant;
pub mod scalar;

pub use factor_q::{factor_over_q, rational_roots, FactorConfig, FactorizationQ};
pub use intpoly::IntPoly;
pub use modpoly::{FactorizationModQ, ModPoly, Reducer, KARATSUBA_THRESHOLD};
pub use ratpoly::{parse_rational, rat, RationalPoly};
pub use resultant::{resultant, resultant_in_t};
pub use scalar::{gpoly, Scalar};
