//! Contention resolution on a synchronous shared channel, augmented with
//! network-size predictions and bounded perfect advice.
//!
//! The crate is organised bottom-up:
//!
//! - [`dist`]: network-size distributions, their condensation onto
//!   geometric ranges, entropy and KL divergence.
//! - [`coding`]: Shannon prefix codes over ranges and target-distance codes.
//! - [`channel`]: one round of the shared channel, sampled and exact.
//! - [`algorithms`]: uniform schedules, decay, entropy-ordered and
//!   Willard-style searches.
//! - [`rangefind`]: range-finding sequences and trees, and the transforms
//!   from contention-resolution schedules into them.
//! - [`advice`]: the perfect-advice model, its schemes, and the
//!   selective-family checker.
//! - [`harness`]: seeded Monte Carlo experiments and CSV output.

pub mod advice;
pub mod algorithms;
pub mod channel;
pub mod cli;
pub mod coding;
pub mod dist;
mod error;
pub mod harness;
mod parallel;
pub mod rangefind;
pub mod seed;

pub use error::{Error, Result};
