use crate::error::{argument, domain, Result};
use crate::model::{Permutation, WeightVector};

/// `p(θ₁,…,θₘ) = Π θⱼ / (θⱼ + … + θₘ)`: the probability of drawing the
/// given weights in this order.
pub fn p_sequential(weights_in_draw_order: &[f64]) -> Result<f64> {
    check(weights_in_draw_order)?;
    Ok(p_unchecked(weights_in_draw_order))
}

pub(crate) fn p_unchecked(w: &[f64]) -> f64 {
    let mut suffix = 0.0;
    let mut prod = 1.0;
    for &t in w.iter().rev() {
        suffix += t;
        prod *= t / suffix;
    }
    prod
}

/// `ln p(θ₁,…,θₘ)` from log-weights, with log-sum-exp suffix sums.
pub fn log_p_sequential(log_weights_in_draw_order: &[f64]) -> Result<f64> {
    if log_weights_in_draw_order.is_empty() {
        return Err(argument("empty weight list"));
    }
    if let Some(v) = log_weights_in_draw_order.iter().find(|v| !v.is_finite()) {
        return Err(domain(format!("log-weight {v} is not finite")));
    }
    Ok(log_p_unchecked(log_weights_in_draw_order))
}

pub(crate) fn log_p_unchecked(lw: &[f64]) -> f64 {
    let mut suffix = f64::NEG_INFINITY;
    let mut acc = 0.0;
    for &l in lw.iter().rev() {
        suffix = log_add_exp(suffix, l);
        acc += l - suffix;
    }
    acc
}

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn check(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(argument("empty weight list"));
    }
    if let Some(v) = w.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(domain(format!("weight {v} must be positive and finite")));
    }
    Ok(())
}

/// `P(σₙ = σ) = p(θ_{σ⁻¹(1)}, …, θ_{σ⁻¹(n)})`.
pub fn luce_pmf(weights: &WeightVector, sigma: &Permutation) -> Result<f64> {
    let order = draw_order(weights, sigma)?;
    if weights.has_underflow() {
        let lw: Vec<f64> = order.iter().map(|&i| weights.logs()[i]).collect();
        Ok(log_p_unchecked(&lw).exp())
    } else {
        Ok(p_unchecked(&weights.gather(&order)))
    }
}

/// `ln P(σₙ = σ)`.
pub fn log_luce_pmf(weights: &WeightVector, sigma: &Permutation) -> Result<f64> {
    let order = draw_order(weights, sigma)?;
    let lw: Vec<f64> = order.iter().map(|&i| weights.logs()[i]).collect();
    Ok(log_p_unchecked(&lw))
}

fn draw_order(weights: &WeightVector, sigma: &Permutation) -> Result<Vec<usize>> {
    if weights.len() != sigma.len() {
        return Err(argument(format!(
            "{} weights but a permutation of size {}",
            weights.len(),
            sigma.len()
        )));
    }
    Ok(sigma.inverse().as_slice().iter().map(|&v| v as usize - 1).collect())
}
