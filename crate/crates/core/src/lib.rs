//! A finite-model workbench for duality hyperdoctrines `Hom(-, Ω)`.
//!
//! The crate builds finite ordered algebras (including orthomodular lattices
//! of rational subspaces), finite base categories of sets, topological spaces
//! and convexity spaces, and the hyperdoctrine of Ω-valued predicates over
//! them. On top of that it provides exhaustive verifiers for the quantifier
//! adjunctions, Beck-Chevalley squares, comprehension and generic objects; the
//! category of partial equivalence relations and the Ω-valued set universe;
//! and a typed first-order quantum logic with a sequent checker.

pub mod algebra;
pub mod base;
pub mod error;
pub mod hyperdoctrine;
pub mod linalg;
pub mod logic;
pub mod report;
pub mod subspace;
pub mod topos;

pub use algebra::{AlgebraClass, Elem, FiniteAlgebra};
pub use error::{Error, Result};
pub use report::{LawCheck, LawReport, Status};

/// Arbitrary-precision rationals, the default scalar for subspace lattices.
pub type Rational = num_rational::BigRational;
/// Subspaces of `ℚ^d`.
pub type RationalSubspace = linalg::Subspace<Rational>;
/// A subspace-lattice request over `ℚ`.
pub type SubspaceLatticeSpec = subspace::LatticeSpec<Rational>;
