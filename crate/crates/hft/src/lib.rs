//! Exact correlators and identity checks for finite-dimensional cyclic Hodge
//! algebras: ψ-intersection numbers, graph sums, potentials, and the
//! translation of tautological relations into correlator identities.

pub mod correlators;
pub mod examples;
pub mod graph;
pub(crate) mod network;
pub mod psi;
pub mod rational;
pub mod search;
pub mod strata;
pub mod superalgebra;
pub mod vanishing;

pub use rational::Rational;
pub use superalgebra::{Algebra, Operator, Parity, Vector};
