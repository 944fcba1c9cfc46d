//! Symbolic computation with free universal algebras and the categories
//! they form: word problems, derived operations, hom-sets, candidate
//! category automorphisms, and brute-force checks on finite algebras.

pub mod automorphism;
pub mod category;
pub mod derived;
pub mod error;
pub mod finite;
pub mod term;
pub mod variety;

pub use error::{Error, Result};
pub use term::{enumerate_terms, parse_term, Signature, Substitution, Term, DEFAULT_CAP};
pub use variety::{
    enumerate_normal_forms, equal_in_free, identity_holds, invert, munn_tree, normalize,
    MunnElement, NormalForm, Variety,
};
