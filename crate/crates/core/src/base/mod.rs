//! Finite base categories: finite sets, finite topological spaces and finite
//! convexity spaces, with products, diagonals, exponentials (sets only) and
//! exhaustive morphism enumeration.
//!
//! The forgetful functor to sets is carrier extraction: every object has a
//! list of point labels and every morphism a total table on point indices.

mod morphism;
mod object;

pub use morphism::{
    compose, diagonal, enumerate_morphisms, identity, pairing, product_map, validate_morphism, BaseMorphism,
    MorphismFile, DEFAULT_MORPHISM_BOUND,
};
pub(crate) use morphism::all_tables;
pub use object::{
    exponential, interval_convexity, product, sierpinski, subobject, terminal, validate_object, BaseObject,
    ObjectFile, ObjectKind, PointSet, Product, MAX_STRUCTURED_POINTS,
};
