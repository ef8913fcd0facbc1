//! Summary statistics and goodness-of-fit helpers used by the experiments.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// A Monte Carlo (or deterministic, `stderr = 0`) estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, stderr: 0.0, samples: 1 }
    }

    /// Proportion `hits / samples` with the binomial standard error.
    pub fn from_hits(hits: u64, samples: u64) -> Self {
        assert!(samples > 0);
        let p = hits as f64 / samples as f64;
        Estimate {
            value: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }

    /// Mean of a sample with the standard error of the mean.
    pub fn from_moments(m: &Moments) -> Self {
        Estimate {
            value: m.mean(),
            stderr: (m.variance() / m.count() as f64).sqrt(),
            samples: m.count(),
        }
    }

    /// `|value - reference| <= k·stderr`.
    pub fn within(&self, reference: f64, k: f64) -> bool {
        (self.value - reference).abs() <= k * self.stderr
    }
}

/// Kahan–Babuška compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::Sum<f64> for KahanSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        iter.for_each(|x| k.add(x));
        k
    }
}

/// Streaming mean/variance (Welford). Shards combine with [`Moments::merge`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 for fewer than two points).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::new();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    Normal::new(mean, sd).expect("positive sd").cdf(x)
}

/// Upper quantile of the chi-square distribution: `P(X <= q) = level`.
pub fn chi_square_quantile(df: f64, level: f64) -> f64 {
    ChiSquared::new(df).expect("positive df").inverse_cdf(level)
}

pub fn chi_square_sf(stat: f64, df: f64) -> f64 {
    1.0 - ChiSquared::new(df).expect("positive df").cdf(stat)
}

/// Pearson statistic `Σ (obs - exp)² / exp` over cells with positive expectation.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum()
}

/// Two-sample chi-square homogeneity statistic for equal-size samples over
/// common cells; returns `(statistic, degrees of freedom)`.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, f64) {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let (na, nb) = (na as f64, nb as f64);
    let mut stat = 0.0;
    let mut cells = 0;
    for (&x, &y) in a.iter().zip(b) {
        let tot = (x + y) as f64;
        if tot == 0.0 {
            continue;
        }
        cells += 1;
        let ea = tot * na / (na + nb);
        let eb = tot * nb / (na + nb);
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    (stat, (cells - 1) as f64)
}

/// Asymptotic Kolmogorov survival function `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test of `data` against `cdf`.
///
/// `lattice`, when given, is the spacing of a lattice the data live on; the
/// reference CDF is then evaluated at the midpoints between lattice values
/// (continuity correction) and the comparison is made only at the lattice
/// values themselves, where the empirical CDF jumps.
pub fn ks_test<C: Fn(f64) -> f64>(data: &[f64], cdf: C, lattice: Option<f64>) -> KsOutcome {
    assert!(!data.is_empty());
    let mut xs = data.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = j as f64 / n;
        match lattice {
            Some(h) => {
                let lo = cdf(x - 0.5 * h);
                let hi = cdf(x + 0.5 * h);
                d = d.max((upto - hi).abs()).max((below - lo).abs());
            }
            None => {
                let c = cdf(x);
                d = d.max((upto - c).abs()).max((c - below).abs());
            }
        }
        i = j;
    }
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    KsOutcome { statistic: d, p_value: kolmogorov_sf(lambda) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.5).collect();
        let all: Moments = xs.iter().copied().collect();
        let mut left: Moments = xs[..300].iter().copied().collect();
        let right: Moments = xs[300..].iter().copied().collect();
        left.merge(&right);
        assert!((all.mean() - left.mean()).abs() < 1e-12);
        assert!((all.variance() - left.variance()).abs() < 1e-9);
    }

    #[test]
    fn kahan_recovers_small_terms() {
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..1_000_000 {
            k.add(1e-16);
        }
        assert!((k.total() - (1.0 + 1e-10)).abs() < 1e-15);
    }

    #[test]
    fn kolmogorov_tail_known_points() {
        // Critical values of the limiting distribution.
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn ks_accepts_uniform_grid() {
        let data: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let out = ks_test(&data, |x| x.clamp(0.0, 1.0), None);
        assert!(out.statistic <= 0.001 + 1e-12);
        assert!(out.p_value > 0.99);
    }

    #[test]
    fn chi_square_quantile_reference() {
        // χ²(5) 0.999 quantile ≈ 20.515
        assert!((chi_square_quantile(5.0, 0.999) - 20.515).abs() < 1e-2);
    }
}
