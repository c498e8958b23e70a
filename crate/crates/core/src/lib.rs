//! Defining ideals of Rees algebras of grade-2 perfect ideals with almost
//! linear presentation.
//!
//! The crate bundles an exact polynomial kernel ([`polyring`], [`groebner`],
//! [`polymatrix`]), the Jacobian-dual constructions ([`reescore`]), a random
//! instance harness ([`harness`]) and the command-line front end ([`cli`]).

pub mod cli;
pub mod error;
pub mod field;
pub mod groebner;
pub mod harness;
pub mod polymatrix;
pub mod polyring;
pub mod reescore;

pub use error::{ReesError, Result};
pub use field::{Field, FieldSpec, PrimeField, Rationals};
pub use groebner::{GbBudget, GroebnerBasis, Ideal};
pub use polyring::{Monomial, MonomialOrder, PolyRing, Polynomial, RingRef};
pub use polymatrix::PolyMatrix;
pub use reescore::{PresentationInput, ReesReport};
