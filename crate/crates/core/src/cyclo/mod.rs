//! Cyclotomic fields, their Gaussian-period subfields, and root finding in them.

pub mod cyclofield;
pub mod numfield;
pub mod roots;
pub mod subfield;

pub use cyclofield::{cyclotomic_poly, units_mod, CycloField};
pub use numfield::{solve_linear, NfElem, NumberField};
pub use roots::{roots_in_cyclo, roots_in_number_field, roots_in_subfield, roots_over_field, sqrt_in_field};
pub use subfield::{coset_reps, coset_reps_within, is_subgroup, layer_group, subgroup_generated, Subfield};
