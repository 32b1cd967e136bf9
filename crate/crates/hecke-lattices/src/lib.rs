//! Stable lattices in locally unitary principal series modules.
//!
//! The crate builds, step by step, the combinatorial machinery behind a
//! family of Hecke-module lattices indexed by permutations:
//!
//! * [`coxeter`]: the finite symmetric group on {0, ..., d}, its length
//!   function, the rotation `ubar`, and reduced words.
//! * [`weights`]: balanced integer weights (a subset inequality system),
//!   their reversal symmetry, reduction to one rank lower, and enumeration.
//! * [`scalars`]: exact arithmetic in a ramified cyclotomic coefficient
//!   ring with uniformizer `pi`, `pi^r = q`, plus its residue field.
//! * [`nabla`]: integrating functions on the permutation group attached to
//!   a balanced weight, with their rotation and ascent conditions.
//! * [`psmod`]: Hecke operator matrices on the principal-series fixed
//!   space, lattice rescaling, stability, the unitarity criterion, and
//!   duality.
//! * [`wtype`]: the residue-field modules obtained by reducing a stable
//!   lattice mod the maximal ideal, and their reconstruction from sign and
//!   increment data.
//! * [`oracle`]: an independent brute-force check of the operator
//!   formulas over an explicit Laurent-series matrix model of the group.
//! * [`suite`]: the ten-part acceptance battery tying all of the above
//!   together, shared by the integration tests and the command line.
//!
//! A guided tour with runnable examples lives in [`book`]; the same
//! chapters render standalone under `book/` via mdbook.

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

pub mod book;
pub mod coxeter;
pub mod matrix;
pub mod nabla;
pub mod oracle;
pub mod psmod;
pub mod scalars;
pub mod suite;
pub mod weights;
pub mod wtype;
