//! Luce (Plackett–Luce) random permutations.
//!
//! A permutation `σ` of `[n]` is Luce-distributed with weights `θ₁..θₙ` when
//! the labels are drawn from an urn without replacement, each with probability
//! proportional to its weight, and `σ(i)` records the step at which label `i`
//! is drawn. This crate provides:
//!
//! * [`model`]: weight containers, the exact probability mass function and two
//!   equidistributed samplers (sequential urn and exponential race);
//! * [`patterns`]: classical and consecutive pattern statistics;
//! * [`permuton`]: the limiting permuton, its density and pattern densities;
//! * [`locallimits`]: exact limit constants for consecutive patterns;
//! * [`inversions`]: exact moments of the inversion count;
//! * [`topk`]: probabilities of prescribed draw-order events;
//! * [`experiments`]: the seeded experiment harness behind the `luce` CLI.

pub mod error;
pub mod experiments;
pub mod inversions;
pub mod io;
pub mod locallimits;
pub mod model;
pub mod numeric;
pub mod patterns;
pub mod permuton;
pub mod topk;

pub use error::{Error, Result};
pub use model::{
    luce_pmf, p_sequential, rng_stream, sample_luce_race, sample_luce_sequential, Permutation,
    RngStream, WeightProfile, WeightVector,
};
pub use numeric::rational::ExactRational;
pub use numeric::stats::Estimate;
pub use patterns::{CountResult, Pattern};
pub use permuton::PermutonModel;
