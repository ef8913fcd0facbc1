//! Weights, the exact Luce law and its samplers.

mod permutation;
mod pmf;
mod profile;
mod rng;
mod sampler;
mod weights;

pub use permutation::Permutation;
pub use pmf::{log_luce_pmf, log_p_sequential, luce_pmf, p_sequential};
pub(crate) use pmf::p_unchecked;
pub use profile::WeightProfile;
pub use rng::{derive_seed, rng_stream, RngStream};
pub use sampler::{sample_luce_race, sample_luce_sequential};
pub(crate) use sampler::ranks_of;
pub use weights::WeightVector;

/// Which sampler to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    #[default]
    Sequential,
    Race,
}

impl Algorithm {
    pub fn sample<R: rand::Rng + ?Sized>(self, weights: &WeightVector, rng: &mut R) -> Permutation {
        match self {
            Algorithm::Sequential => sample_luce_sequential(weights, rng),
            Algorithm::Race => sample_luce_race(weights, rng),
        }
    }
}
