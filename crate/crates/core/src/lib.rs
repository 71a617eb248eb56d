//! Potential functions reconstructed from the tridiagonal representation of
//! a Hamiltonian built on continuous dual Hahn polynomials.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod cdh;
pub mod error;
pub mod fit;
pub mod hamiltonian;
pub mod kinetic;
pub mod lagint;
pub mod linalg;
pub mod presets;
pub mod quadrature;
pub mod reconstruct;
pub mod specfun;

pub use error::{Error, Result};
