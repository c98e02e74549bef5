//! Apollonian circle packings built two independent ways, as integer
//! Descartes-quadruple orbits ([`quad`]) and by circle inversions
//! ([`geometry`]), together with the counting, arithmetic, spectral and sieve
//! statistics computed over them.

// `!(x > 0.0)` style checks are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod arithmetic;
pub mod cli;
pub mod config;
pub mod congruence;
pub mod counting;
pub mod geometry;
pub mod primes;
pub mod quad;
pub mod render;
pub mod sieve;

pub use error::{Error, Result};
