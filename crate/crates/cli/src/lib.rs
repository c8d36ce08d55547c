//! Lemma registry, curve database and report format behind the `ttower` binary.

pub mod db;
pub mod lemmas;
pub mod report;

pub use db::{CurveDb, MissingCurves};
pub use lemmas::{registry, select, EmittedCertificate, LemmaDef, Tier, Verifier};
pub use report::{strip_timing, Report, Status};
