//! Spectral-lattice toolkit for Laplacians on flat tori.
//!
//! The crate covers the eigenvalue geometry `μ_j = |Wj|²` of a lattice, the
//! clustering of those eigenvalues into separated blocks, the block-diagonal
//! constructions built on that partition, and singular-site analysis for
//! quasi-periodic wave and Schrödinger symbols.

pub mod boxes;
pub mod clustering;
pub mod compound;
pub mod delort;
pub mod error;
pub mod intervals;
pub mod lattice;
pub mod matrix;
pub mod quasi;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use lattice::{ArithmeticMode, LatticeBasis, RationalLattice};
pub use matrix::Matrix;
pub use scalar::{Exponent, Rational, Scalar};
