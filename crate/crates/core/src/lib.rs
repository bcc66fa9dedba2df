//! Numerical experiments on self-approximation of the Riemann zeta function.
//!
//! The crate evaluates `zeta(s)` and truncated Euler products to controlled
//! accuracy, samples the random Euler products `zeta(s, omega)` indexed by
//! points of the infinite torus, searches for heights `tau` at which all
//! phases `tau * ln p` are close to multiples of `2*pi`, and estimates how
//! often `zeta(s + i j tau)` is uniformly close to `zeta(s + i k tau)` on a
//! compact rectangle.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod error;
pub mod extended;
pub mod kronecker;
pub mod mollifier;
pub mod primes;
pub mod rng;
pub mod scanner;
pub mod stats;
pub mod target;
pub mod torus;
pub mod zeta;

pub use error::{Error, Result};
