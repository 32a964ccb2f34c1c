//! Exact-arithmetic toolkit for symmetric partition function form games with
//! probabilistic coalitional beliefs.
//!
//! * [`partitions`]: set partitions, shapes and multiplicities.
//! * [`game`]: worth tables and structural checks (efficiency, externality
//!   sign, per-member monotonicity, symmetry).
//! * [`beliefs`]: beliefs over outsider shapes, expected worths, the step
//!   condition linking `n` and `n + 1` players, and a seeded sampler.
//! * [`induced`]: the induced game, blocking, equal split and the exact core LP.
//! * [`harness`]: end-to-end verification over game families.
//! * [`generators`]: Cournot, a negative-externality family, random games.
//!
//! All arithmetic is exact; there is no floating-point path.

pub mod beliefs;
pub mod error;
pub mod game;
pub mod generators;
pub mod harness;
pub mod induced;
pub mod limits;
pub mod lp;
pub mod par;
pub mod partitions;
pub mod random;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
