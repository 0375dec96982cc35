//! Exact computations with finite Heisenberg groups.

pub mod abelian;
pub mod bicharacter;
pub mod canonical_rep;
pub mod cli;
pub mod cyclotomic;
pub mod darboux;
pub mod error;
pub mod heisenberg_model;
pub mod inductive_classifier;
pub mod intertwiner;
pub mod io;
pub mod monomial;
pub mod scalar;
pub mod selftest;
pub mod snf;

pub use error::{Error, Result};
pub use abelian::{FiniteAbelianGroup, GroupElement, GroupHom, Subgroup};
pub use bicharacter::Bicharacter;
pub use canonical_rep::{build_representation, CanonicalRep};
pub use darboux::{classify, HeisenbergType};
pub use heisenberg_model::{Cocycle, ExtendedCharacter, HeisenbergElement};
pub use monomial::MonomialMatrix;

/// Elements of `Q(ζ_L)` with exact rational coefficients.
pub type Cyclotomic = cyclotomic::Cyclotomic<num_rational::BigRational>;
pub type CyclotomicField = cyclotomic::CyclotomicField<num_rational::BigRational>;
/// Integer matrices for Smith normal form work.
pub type IntMatrix = snf::Matrix<num_bigint::BigInt>;
pub type Intertwiner = intertwiner::IntertwinerResult<f64>;
