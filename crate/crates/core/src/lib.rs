//! Loxodromic elements and pairs in `SU(n,1)`.
//!
//! The crate covers the Hermitian form and its group, boundary invariants
//! (Cartan's angular invariant, cross ratios, invariant vectors),
//! single-element analysis (classification, regularity, eigenframes) and
//! loxodromic pairs (eigenpoint normalizations and a staged conjugacy
//! decision). The guide in `book/` walks through each part.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod form;
pub mod json;
pub mod linalg;
pub mod loxodromic;
pub mod pair;
pub mod poly;
pub mod random;
pub mod tol;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/hermitian-form.md")]
    pub mod hermitian_form {}
    #[doc = include_str!("../../../book/src/boundary-invariants.md")]
    pub mod boundary_invariants {}
    #[doc = include_str!("../../../book/src/loxodromic-elements.md")]
    pub mod loxodromic_elements {}
    #[doc = include_str!("../../../book/src/pairs.md")]
    pub mod pairs {}
    #[doc = include_str!("../../../book/src/conjugacy.md")]
    pub mod conjugacy {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    pub mod command_line {}
    #[doc = include_str!("../../../book/src/tolerances.md")]
    pub mod tolerances {}
}
