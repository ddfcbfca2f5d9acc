#![no_std]
//! Spin chains, the triangle Bose-Hubbard mapping, free-fermion correlations
//! and localizable entanglement for cluster-type Hamiltonians.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bose_hubbard;
pub mod correlations;
pub mod error;
pub mod free_fermion;
pub mod localizable;
pub mod quadrature;
pub mod spin_core;

pub use error::{Error, Result};
