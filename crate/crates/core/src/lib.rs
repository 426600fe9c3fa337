//! Restricted sumsets `A +_R B = {a + b : (a, b) not in R}` over the integers
//! and over Z/pZ.
//!
//! The crate evaluates restricted sumsets exactly, generates the known
//! extremal constructions, computes the exact minimum of `|A +_R B|` over
//! degree-constrained relations, and checks the surrounding counting
//! identities, rectification certificates and explicit constants.

pub mod constructions;
pub mod error;
pub mod ops;
pub mod rational;
pub mod rectify;
pub mod relation;
pub mod search;
pub mod sets;
pub mod stability;
pub mod verify;

pub use error::{Error, Result};
pub use ops::{dilate, iterated_span, restricted_sumset, sumset};
pub use relation::{Relation, RelationConstraint};
pub use sets::{AdditiveSet, IntegerSet, Prime, ResidueSet};
