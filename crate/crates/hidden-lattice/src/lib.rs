//! Exact-arithmetic toolkit for the hidden lattice problem: recovering a
//! small lattice L of rank n from a rank-r sublattice M known modulo N,
//! by orthogonal-lattice and congruence-lattice reduction, plus the noisy
//! and decisional variants, parameter bounds, and instance generators.

pub mod arith;
pub mod bounds;
pub mod io;
pub mod lab;
pub mod lattice;
pub mod lll;
pub mod matrix;
pub mod solve;
pub mod transforms;

pub use lattice::{LatticeBasis, MinimaProfile};
pub use lll::{ReductionParams, ReductionStats};
pub use matrix::{IntegerMatrix, RationalMatrix};
