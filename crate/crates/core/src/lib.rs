//! Exact arithmetic and verification machinery for torsion of elliptic curves
//! over abelian towers of Q.

pub mod arith;
pub mod cyclo;
pub mod elliptic;
pub mod error;
pub mod galois;
pub mod knowledge;
pub mod tower;

pub use error::{Error, Result};
