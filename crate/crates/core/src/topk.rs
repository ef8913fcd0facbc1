//! Probabilities of prescribed draw-order events.
//!
//! For labels `a₁, …, a_k` the event is `E_{a₁} > E_{a₂} > … > E_{a_k} > Eⱼ`
//! for every other label `j`, where `Eᵢ` are the race clocks: `a₁` is drawn
//! last, `a₂` second to last, and so on. In terms of the sampled permutation
//! this is `σ(a₁) = n, σ(a₂) = n-1, …`.

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{argument, capacity, domain, Result};
use crate::model::{RngStream, WeightVector};
use crate::numeric::mc::sharded_frequency;
use crate::numeric::quad::integrate_with_breaks;
use crate::numeric::stats::Estimate;
use crate::permuton::PermutonModel;

/// Distinct 1-based labels `a₁, …, a_k` within `[n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionQuery {
    labels: Vec<usize>,
    n: usize,
}

impl PositionQuery {
    pub fn new(labels: Vec<usize>, n: usize) -> Result<Self> {
        if labels.is_empty() || labels.len() > n {
            return Err(argument(format!("need between 1 and n = {n} labels")));
        }
        if let Some(a) = labels.iter().find(|&&a| a == 0 || a > n) {
            return Err(argument(format!("label {a} outside 1..={n}")));
        }
        if labels.iter().enumerate().any(|(i, a)| labels[..i].contains(a)) {
            return Err(argument("labels must be distinct"));
        }
        Ok(PositionQuery { labels, n })
    }

    pub fn single(a: usize, n: usize) -> Result<Self> {
        Self::new(vec![a], n)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopkMethod {
    /// Deterministic one-dimensional quadrature; `k = 1` only.
    Quadrature,
    MonteCarlo { samples: u64, seed: u64 },
}

/// True when the largest keys are those of `labels` (1-based), in that order.
fn event_holds(keys: &mut [f64], labels: &[usize]) -> bool {
    let idx: Vec<usize> = labels.iter().map(|a| a - 1).collect();
    event_holds_at(keys, &idx)
}

fn event_holds_at(keys: &mut [f64], idx: &[usize]) -> bool {
    let mut prev = f64::INFINITY;
    for &i in idx {
        let key = keys[i];
        if !(key < prev) {
            return false;
        }
        prev = key;
    }
    // every other key must lie below the last queried one
    for &i in idx {
        keys[i] = f64::NEG_INFINITY;
    }
    keys.iter().all(|&x| x < prev)
}

pub fn topk_probability_luce(weights: &WeightVector, query: &PositionQuery, method: TopkMethod) -> Result<Estimate> {
    if weights.len() != query.n {
        return Err(argument(format!("query is for n = {} but there are {} weights", query.n, weights.len())));
    }
    match method {
        TopkMethod::Quadrature => {
            if query.k() != 1 {
                return Err(capacity("quadrature handles a single label; use Monte Carlo for k > 1"));
            }
            if weights.has_underflow() {
                return Err(domain("weights span too many orders of magnitude for quadrature; use Monte Carlo"));
            }
            Ok(Estimate::exact(last_drawn_quadrature(weights.values(), query.labels[0] - 1)))
        }
        TopkMethod::MonteCarlo { samples, seed } => {
            check_samples(samples)?;
            let logs = weights.logs();
            Ok(sharded_frequency(samples, seed, |rng| {
                let mut keys: Vec<f64> = logs.iter().map(|l| race_clock(rng).ln() - l).collect();
                event_holds(&mut keys, &query.labels)
            }))
        }
    }
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(argument("samples must be at least 1"));
    }
    Ok(())
}

fn race_clock(rng: &mut RngStream) -> f64 {
    rng.sample(Exp1)
}

/// `∫₀^∞ θ_a e^{-θ_a x} Π_{i≠a} (1 - e^{-θᵢ x}) dx`.
fn last_drawn_quadrature(theta: &[f64], a: usize) -> f64 {
    let ta = theta[a];
    let integrand = |x: f64| {
        let log_prod: f64 = theta
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != a)
            .map(|(_, t)| (-(-t * x).exp()).ln_1p())
            .sum();
        ta * (log_prod - ta * x).exp()
    };
    // beyond x_max the integrand is bounded by θ_a e^{-θ_a x} < e^{-36}
    let x_max = 36.0 / ta;
    let mut breaks = vec![0.0];
    breaks.extend((0..=64).rev().map(|j| x_max * 0.5f64.powi(j)));
    integrate_with_breaks(integrand, &breaks, 1e-13, 1e-11).value
}

/// Same event for `Perm(μ, n)`: the points with the `a₁`-th, `a₂`-th, …
/// smallest `x`-coordinates must carry the largest `y`-coordinates in order.
pub fn topk_probability_permuton(
    model: &PermutonModel,
    query: &PositionQuery,
    reps: u64,
    seed: u64,
) -> Result<Estimate> {
    check_samples(reps)?;
    let n = query.n;
    let k = query.k();
    Ok(sharded_frequency(reps, seed, |rng| {
        let u: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let mut keys: Vec<f64> = u.iter().map(|&x| race_clock(rng).ln() - model.f(x).ln()).collect();
        // labels are ranks of u; locate the queried order statistics in O(n k)
        let mut idx: Vec<usize> = (0..n).collect();
        let mut queried = Vec::with_capacity(k);
        for &a in &query.labels {
            let (_, nth, _) = idx.select_nth_unstable_by(a - 1, |&p, &q| u[p].total_cmp(&u[q]));
            queried.push(*nth);
        }
        event_holds_at(&mut keys, &queried)
    }))
}
