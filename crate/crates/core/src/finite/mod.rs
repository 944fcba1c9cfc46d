//! Finite algebras given by operation tables: homomorphism search,
//! brute-force indicator checks, and the monoids of total and partial
//! transformations of a small set.

mod algebra;
mod indicator;
mod transform;

pub use algebra::{
    homomorphism_defect, homomorphisms, is_homomorphism, load_universe, search_maps, FiniteAlgebra,
    FiniteMap, FiniteOp,
};
pub use indicator::{
    check_certificate, is_left_indicator, is_right_indicator, permutations, Certificate,
    CertificateCheck, IndicatorResult, Side, DEFAULT_MAX_CARRIER,
};
pub use transform::{
    automorphisms_by_generators, automorphisms_exhaustive, check_automorphisms_inner,
    transformation_monoid, AutomorphismReport, AutomorphismWitness, DeltaCheck,
    TransformationMonoid, DEFAULT_MONOID_CAP,
};
