//! Candidate automorphisms of a category of free algebras, the bijection
//! families `s_A` they induce through the represented forgetful functor,
//! and bounded checks of inner-ness.

mod checks;
mod family;
mod inner;
mod report;
mod spec;

pub use checks::{
    assignment_matches_s, check_central, check_functor, check_generators, check_thetas,
    derived_equals_star, extract_family, extract_s, is_potential_inner, phi_assignment,
    reduction_check, s_family_laws, s_value, verify_conjugation, DerivedStar, ReductionScenario,
    ReductionVerdict,
};
pub use family::{BijectionFamily, BijectionTable, CentralFamily};
pub use inner::{decide_inner_via_central, InnerOutcome, InnerSearch, InnerVerdict, InnerWitness};
pub use report::{Check, CheckReport, Status};
pub use spec::{bounded_morphisms, compose_specs, AutomorphismSpec, SpecKind};
