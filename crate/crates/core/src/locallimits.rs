//! Exact and asymptotic constants for consecutive-pattern statistics.
//!
//! Labels in chains are 1-based indices into the rate vector. For independent
//! exponentials `Eᵢ ~ Exp(rᵢ)`,
//! `P(E_{i₁} < … < E_{iₘ}) = Π r_{iⱼ} / (r_{iⱼ} + … + r_{iₘ})`.

use std::ops::{Add, Div, Mul};

use num_traits::{One, Zero};

use crate::error::{argument, capacity, domain, Result};
use crate::model::{p_unchecked, WeightVector};
use crate::numeric::rational::ExactRational;
use crate::patterns::Pattern;

/// Largest ground set accepted by [`joint_chain_probability`].
pub const GROUND_GUARD: usize = 12;

/// Number types the chain formulas are evaluated in.
pub trait Scalar:
    Clone + Zero + One + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + Div<Output = T>
{
}

fn rate<T: Scalar>(rates: &[T], label: usize) -> Result<T> {
    if label == 0 || label > rates.len() {
        return Err(argument(format!("label {label} outside 1..={}", rates.len())));
    }
    Ok(rates[label - 1].clone())
}

/// `P(E_{order[0]} < E_{order[1]} < …)`.
pub fn chain_probability<T: Scalar>(rates: &[T], order: &[usize]) -> Result<T> {
    let chosen: Vec<T> = order.iter().map(|&l| rate(rates, l)).collect::<Result<_>>()?;
    if has_repeat(order) {
        return Err(argument("chain labels must be distinct"));
    }
    let mut suffix = T::zero();
    let mut prod = T::one();
    for r in chosen.into_iter().rev() {
        suffix = suffix + r.clone();
        prod = prod * (r / suffix.clone());
    }
    Ok(prod)
}

fn has_repeat(labels: &[usize]) -> bool {
    labels.iter().enumerate().any(|(i, a)| labels[..i].contains(a))
}

/// The partial order generated by two chains over the union of their labels.
#[derive(Debug, Clone)]
pub struct ChainPoset {
    labels: Vec<usize>,
    preds: Vec<u32>,
}

impl ChainPoset {
    pub fn new(chain1: &[usize], chain2: &[usize]) -> Result<Self> {
        if has_repeat(chain1) || has_repeat(chain2) {
            return Err(argument("chain labels must be distinct"));
        }
        let mut labels: Vec<usize> = chain1.iter().chain(chain2).copied().collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() > GROUND_GUARD {
            return Err(capacity(format!(
                "ground set of {} labels exceeds the guard of {GROUND_GUARD}",
                labels.len()
            )));
        }
        let pos = |l: usize| labels.binary_search(&l).expect("label in ground set");
        let mut preds = vec![0u32; labels.len()];
        for chain in [chain1, chain2] {
            for w in chain.windows(2) {
                preds[pos(w[1])] |= 1 << pos(w[0]);
            }
        }
        Ok(ChainPoset { labels, preds })
    }

    pub fn ground_size(&self) -> usize {
        self.labels.len()
    }

    /// Sum of chain probabilities over all linear extensions; 0 when the
    /// chains conflict. Dynamic programming over down-sets.
    pub fn probability<T: Scalar>(&self, rates: &[T]) -> Result<T> {
        let r: Vec<T> = self.labels.iter().map(|&l| rate(rates, l)).collect::<Result<_>>()?;
        let m = self.labels.len();
        let full = (1u32 << m) - 1;
        // value[D] = P(the remaining labels come out in an admissible order | D drawn first)
        let mut value: Vec<Option<T>> = vec![None; 1 << m];
        value[full as usize] = Some(T::one());
        for set in (0..full).rev() {
            let mut rest = T::zero();
            for (j, rj) in r.iter().enumerate() {
                if set & (1 << j) == 0 {
                    rest = rest + rj.clone();
                }
            }
            let mut acc: Option<T> = None;
            for j in 0..m {
                let bit = 1u32 << j;
                if set & bit != 0 || self.preds[j] & !set != 0 {
                    continue;
                }
                if let Some(next) = &value[(set | bit) as usize] {
                    let term = r[j].clone() / rest.clone() * next.clone();
                    acc = Some(match acc {
                        Some(a) => a + term,
                        None => term,
                    });
                }
            }
            value[set as usize] = acc;
        }
        Ok(value[0].take().unwrap_or_else(T::zero))
    }

    /// Number of linear extensions.
    pub fn linear_extensions(&self) -> u64 {
        let m = self.labels.len();
        let full = (1usize << m) - 1;
        let mut count = vec![0u64; 1 << m];
        count[full] = 1;
        for set in (0..full).rev() {
            count[set] = (0..m)
                .filter(|&j| set & (1 << j) == 0 && self.preds[j] as usize & !set == 0)
                .map(|j| count[set | (1 << j)])
                .sum();
        }
        count[0]
    }
}

/// Probability that both chains hold simultaneously.
pub fn joint_chain_probability<T: Scalar>(rates: &[T], chain1: &[usize], chain2: &[usize]) -> Result<T> {
    ChainPoset::new(chain1, chain2)?.probability(rates)
}

/// `π⁻¹` as 1-based labels, optionally shifted.
fn chain_of(pi: &Pattern, shift: usize) -> Vec<usize> {
    pi.inverse().as_slice().iter().map(|&v| v as usize + shift).collect()
}

fn check_shift(pi: &Pattern, h: usize) -> Result<()> {
    if h == 0 || h >= pi.len() {
        return Err(argument(format!("shift h = {h} must lie in 1..={}", pi.len().saturating_sub(1))));
    }
    Ok(())
}

fn factorial(k: usize) -> ExactRational {
    ExactRational::from_integer((1..=k as i64).product())
}

/// `ζ_π(h)`: both `π`-windows at offsets 0 and `h` under unit rates.
pub fn zeta(pi: &Pattern, h: usize) -> Result<ExactRational> {
    check_shift(pi, h)?;
    let rates = vec![ExactRational::one(); pi.len() + h];
    joint_chain_probability(&rates, &chain_of(pi, 0), &chain_of(pi, h))
}

fn check_k(pi: &Pattern) -> Result<()> {
    if pi.len() < 2 {
        return Err(argument("pattern must have size at least 2"));
    }
    Ok(())
}

/// Limiting variance constant of `cocc(π, ·)` for locally uniform weights.
pub fn nu_infinity_uniform(pi: &Pattern) -> Result<ExactRational> {
    check_k(pi)?;
    let k = pi.len();
    let p = ExactRational::one() / factorial(k);
    let mut total = p.clone() + ExactRational::from_integer(1 - 2 * k as i64) * p.clone() * p;
    for h in 1..k {
        total = total + ExactRational::from_integer(2) * zeta(pi, h)?;
    }
    Ok(total)
}

fn geometric_rates(alpha: &ExactRational, m: usize) -> Result<Vec<ExactRational>> {
    if !alpha.is_positive() {
        return Err(domain(format!("alpha = {alpha} must be positive")));
    }
    Ok((1..=m as i32).map(|i| alpha.pow(-i)).collect())
}

/// `Λ(π)` for weights `θᵢ = α^{n-i+1}`; independent of `n ≥ k`.
pub fn lambda_exponential(pi: &Pattern, alpha: &ExactRational) -> Result<ExactRational> {
    let rates = geometric_rates(alpha, pi.len())?;
    chain_probability(&rates, &chain_of(pi, 0))
}

/// `η_π(h)`: both windows at offsets 0 and `h` under rates `α^{-i}`.
pub fn eta_exponential(pi: &Pattern, h: usize, alpha: &ExactRational) -> Result<ExactRational> {
    check_shift(pi, h)?;
    let rates = geometric_rates(alpha, pi.len() + h)?;
    joint_chain_probability(&rates, &chain_of(pi, 0), &chain_of(pi, h))
}

/// Limiting variance constant of `cocc(π, ·)` for weights `θᵢ = α^{n-i+1}`.
pub fn nu_infinity_exponential(pi: &Pattern, alpha: &ExactRational) -> Result<ExactRational> {
    check_k(pi)?;
    let k = pi.len();
    let p = lambda_exponential(pi, alpha)?;
    let mut total = p.clone() + ExactRational::from_integer(1 - 2 * k as i64) * p.clone() * p;
    for h in 1..k {
        total = total + ExactRational::from_integer(2) * eta_exponential(pi, h, alpha)?;
    }
    Ok(total)
}

fn window_probabilities(weights: &WeightVector, pi: &Pattern) -> Result<Vec<f64>> {
    let (n, k) = (weights.len(), pi.len());
    if k > n {
        return Err(argument(format!("pattern size {k} exceeds n = {n}")));
    }
    let chain: Vec<usize> = chain_of(pi, 0).into_iter().map(|l| l - 1).collect();
    Ok((0..=n - k)
        .map(|i| {
            let w = weights.window(i, k);
            let ordered: Vec<f64> = chain.iter().map(|&j| w[j]).collect();
            p_unchecked(&ordered)
        })
        .collect())
}

/// `(1/n) Σᵢ p(θ_{i+π⁻¹(1)}, …, θ_{i+π⁻¹(k)})`.
pub fn lambda_finite(weights: &WeightVector, pi: &Pattern) -> Result<f64> {
    let p = window_probabilities(weights, pi)?;
    Ok(p.iter().sum::<f64>() / weights.len() as f64)
}

/// Exact variance `ν_n(π)²` of `cocc(π, σ_n)`.
pub fn nu_n_squared(weights: &WeightVector, pi: &Pattern) -> Result<f64> {
    let p = window_probabilities(weights, pi)?;
    let (n, k) = (weights.len(), pi.len());
    let mut var: f64 = p.iter().map(|q| q - q * q).sum();
    for h in 1..k {
        if h + k > n {
            break;
        }
        let poset = ChainPoset::new(&chain_of(pi, 0), &chain_of(pi, h))?;
        let mut cov = 0.0;
        for i in 0..=n - k - h {
            let joint = poset.probability(&weights.window(i, k + h))?;
            cov += joint - p[i] * p[i + h];
        }
        var += 2.0 * cov;
    }
    Ok(var)
}

/// Berry–Esseen bound `32(1+√6) n k² / ν³` for the normalized `cocc`.
pub fn be_bound_cocc(n: u64, k: usize, nu_n: f64) -> Result<f64> {
    if !(nu_n.is_finite() && nu_n > 0.0) {
        return Err(domain(format!("nu_n = {nu_n} must be positive")));
    }
    Ok(32.0 * (1.0 + 6f64.sqrt()) * n as f64 * (k * k) as f64 / nu_n.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }
    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn chain_examples() {
        let r = [q(1, 2), q(1, 4), q(1, 8)];
        assert_eq!(chain_probability(&r, &[1, 2, 3]).unwrap(), q(8, 21));
        assert_eq!(chain_probability(&vec![q(1, 1); 4], &[4, 2, 1, 3]).unwrap(), q(1, 24));
        assert_eq!(chain_probability(&[q(5, 1)], &[1]).unwrap(), q(1, 1));
        assert!(chain_probability(&r, &[1, 4]).is_err());
    }

    #[test]
    fn joint_examples() {
        let ones = vec![q(1, 1); 5];
        assert_eq!(joint_chain_probability(&ones, &[1, 2], &[2, 3]).unwrap(), q(1, 6));
        assert_eq!(joint_chain_probability(&ones, &[1, 3, 2], &[2, 4, 3]).unwrap(), q(0, 1));
        assert_eq!(joint_chain_probability(&ones, &[1, 3, 2], &[3, 5, 4]).unwrap(), q(1, 40));
        assert_eq!(ChainPoset::new(&[1, 3, 2], &[3, 5, 4]).unwrap().linear_extensions(), 3);
        let wide: Vec<usize> = (1..=13).collect();
        assert!(matches!(
            joint_chain_probability(&vec![1.0; 13], &wide, &[1]),
            Err(crate::Error::Capacity(_))
        ));
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta(&pat("12"), 1).unwrap(), q(1, 6));
        assert_eq!(zeta(&pat("123"), 1).unwrap(), q(1, 24));
        assert_eq!(zeta(&pat("123"), 2).unwrap(), q(1, 120));
        assert_eq!(zeta(&pat("132"), 1).unwrap(), q(0, 1));
        assert!(zeta(&pat("12"), 2).is_err());
    }

    #[test]
    fn uniform_nu() {
        assert_eq!(nu_infinity_uniform(&pat("12")).unwrap(), q(1, 12));
        assert_eq!(nu_infinity_uniform(&pat("123")).unwrap(), q(23, 180));
        assert_eq!(nu_infinity_uniform(&pat("132")).unwrap(), q(7, 90));
        assert!(nu_infinity_uniform(&pat("1")).is_err());
    }

    #[test]
    fn exponential_constants() {
        let two = q(2, 1);
        assert_eq!(lambda_exponential(&pat("21"), &two).unwrap(), q(1, 3));
        assert_eq!(lambda_exponential(&pat("312"), &two).unwrap(), q(2, 35));
        assert_eq!(lambda_exponential(&pat("231"), &q(1, 1)).unwrap(), q(1, 6));
        assert_eq!(eta_exponential(&pat("12"), 1, &q(1, 1)).unwrap(), q(1, 6));
        assert_eq!(eta_exponential(&pat("12"), 1, &two).unwrap(), q(8, 21));
        assert_eq!(nu_infinity_exponential(&pat("12"), &two).unwrap(), q(2, 21));
        assert_eq!(nu_infinity_exponential(&pat("123"), &two).unwrap(), q(6184, 22785));
        assert_eq!(nu_infinity_exponential(&pat("213"), &two).unwrap(), q(1496456, 15197595));
        assert!(lambda_exponential(&pat("12"), &q(-1, 1)).is_err());
    }

    #[test]
    fn finite_quantities() {
        let w = WeightVector::uniform(10).unwrap();
        let l = lambda_finite(&w, &pat("132")).unwrap();
        assert!((l - 8.0 / 60.0).abs() < 1e-15);
        let w = crate::WeightProfile::exp_sukhatme(2.0).unwrap().weights(40).unwrap();
        // n Λ_n = (n-k+1) Λ for geometric weights
        let l = lambda_finite(&w, &pat("312")).unwrap();
        assert!((l * 40.0 / 38.0 - 2.0 / 35.0).abs() < 1e-14);
        // uniform, π = 21: Var cocc = (n-1)/4 - 2(n-2)/12 + ... closed form (n+1)/12
        let v = nu_n_squared(&WeightVector::uniform(50).unwrap(), &pat("21")).unwrap();
        assert!((v - 51.0 / 12.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn be_bound() {
        let n = 1e6;
        let b = be_bound_cocc(1_000_000, 2, (n / 12.0f64).sqrt()).unwrap();
        let expect = 32.0 * (1.0 + 6f64.sqrt()) * 4.0 * n / (n / 12.0f64).powf(1.5);
        assert!((b - expect).abs() < 1e-12 * expect);
        assert!(be_bound_cocc(10, 2, 0.0).is_err());
        assert!(be_bound_cocc(10, 2, 2.0).unwrap() < be_bound_cocc(10, 2, 1.0).unwrap());
        assert!((be_bound_cocc(10, 4, 1.0).unwrap() / be_bound_cocc(10, 2, 1.0).unwrap() - 4.0).abs() < 1e-12);
    }
}
