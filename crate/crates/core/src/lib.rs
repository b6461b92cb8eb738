//! Exact computational tools around graded Lie algebras over F_p and
//! F_p[pi], Hall commutator collection in free groups, p-adic lattices with
//! group actions, and Hausdorff-dimension bookkeeping for the filtration
//! series these structures carry.
//!
//! Everything is exact: prime-field linear algebra in reduced echelon form,
//! unbounded integers for dimensions and indices, rationals for densities
//! and dimension ratios. Randomised suites are driven by explicit seeds and
//! are reproducible byte for byte.

pub mod arith;
pub mod echelon;
pub mod error;
pub mod fp;
pub mod fplie;
pub mod mixedlie;
pub mod collect;
pub mod hdim;
pub mod lattice;
pub mod spectra;

pub use error::{Error, Result};
