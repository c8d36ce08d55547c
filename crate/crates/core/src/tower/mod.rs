//! Abelian fields and towers, completely split primes, no-root certificates and exact
//! torsion over finite abelian fields.

pub mod abelian;
pub mod certificate;
pub mod fieldspec;
pub mod split;
pub mod torsion;

pub use abelian::{
    exact_order_points, irreducible_roots_in_field, primary_part, root_field_group, split_prime_order_bound,
    square_root_in_field, AbelianField, ExactOrderCount, ExactSubfield, FieldPoint, PrimaryPart, YStatus,
    DEFAULT_DEGREE_BUDGET,
};
pub use certificate::{
    certify_no_root, excluded_primes_for_division_poly, recheck, CertifyConfig, CertifyOutcome, NoRootCertificate,
    PolyFingerprint, PolyRecipe, Witness,
};
pub use fieldspec::{reduce_conductor, split_condition, split_congruence, FieldSpec, SplitCondition, Tower};
pub use split::{find_split_primes, find_split_primes_after, SPLIT_SEARCH_CAP};
pub use torsion::{
    cyclotomic_levels, cyclotomic_stable_level, in_k_list, reduction_bound, resolve_prime, search_field,
    stabilization_level, torsion_over_field, torsion_over_tower, Artifact, OrderEvidence, PointRecord,
    PrimeResolution, TorsionConfig, TowerTorsion, Verdict,
};
