//! Deterministic sharded Monte Carlo.
//!
//! `samples` draws are split over a fixed number of shards, shard `s` using
//! the stream `(seed, s)`. Shards run in parallel and are merged in shard
//! order, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::model::{rng_stream, RngStream};
use crate::numeric::stats::{Estimate, Moments};

pub const SHARDS: u32 = 64;

fn shard_sizes(samples: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let shards = SHARDS as u64;
    (0..SHARDS)
        .into_par_iter()
        .map(move |s| (s as u64, samples / shards + u64::from((s as u64) < samples % shards)))
}

/// Mean of `draw` over `samples` draws.
pub fn sharded_mean<F>(samples: u64, seed: u64, draw: F) -> Estimate
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let parts: Vec<Moments> = shard_sizes(samples)
        .map(|(s, count)| {
            let mut rng = rng_stream(seed, s);
            (0..count).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    let mut all = Moments::new();
    for m in &parts {
        all.merge(m);
    }
    Estimate::from_moments(&all)
}

/// Frequency of `event` over `samples` draws.
pub fn sharded_frequency<F>(samples: u64, seed: u64, event: F) -> Estimate
where
    F: Fn(&mut RngStream) -> bool + Sync,
{
    let hits: u64 = shard_sizes(samples)
        .map(|(s, count)| {
            let mut rng = rng_stream(seed, s);
            (0..count).filter(|_| event(&mut rng)).count() as u64
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Estimate::from_hits(hits, samples)
}
