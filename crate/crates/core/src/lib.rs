//! Solution-free sets for linear equations over prime fields.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bits;
pub mod cayley;
pub mod constructs;
pub mod denssearch;
pub mod eqspec;
pub mod field;
pub mod graph;
pub mod rainbow;
pub mod residues;
pub mod soloracle;
pub mod witness;
