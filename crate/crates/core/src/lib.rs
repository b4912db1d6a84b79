//! Mean-field quantum spin models with random external fields.
//!
//! The crate computes exact finite-`N` pressures of `H = N Sym P(M) + 2 sum_n <b(n), S(n)>`
//! and the variational formula they converge to.

pub mod coherent;
pub mod collective;
pub mod disorder;
pub mod error;
pub mod exact_thermo;
pub mod experiments;
pub mod hamiltonian;
pub mod linalg;
pub mod optimize;
pub mod quadrature;
pub mod spin_algebra;
pub mod varform;

pub use error::{Error, Result};
