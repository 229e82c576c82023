//! Planted-solution QUBO benchmark core.
//!
//! Instances are built from weighted Hebbian outer products of binary
//! patterns, so the low-energy landscape is known ahead of time. The crate
//! covers instance construction ([`instance`]), energies and outcome
//! classification ([`energy`]), continuous relaxation solvers
//! ([`dynamics`]) and exact/spectral references ([`oracle`]).
//!
//! Everything here is pure computation over `alloc` collections; file
//! formats, sweeps and the command line live in the `plantbench` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dynamics;
pub mod energy;
mod error;
pub mod instance;
mod linalg;
pub mod oracle;
pub mod seed;

pub use error::{Error, Result};

/// A binary state, one entry per spin, each `-1` or `+1`.
pub type Spins = alloc::vec::Vec<i8>;

/// Projects a real value onto a spin with the `sign(0) = +1` convention.
#[inline]
pub fn spin_of(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// Returns the global sign flip of `x`.
pub fn mirror(x: &[i8]) -> Spins {
    x.iter().map(|&s| -s).collect()
}

/// Number of coordinates where `a` and `b` differ.
pub fn hamming(a: &[i8], b: &[i8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
