//! Exact moments of the inversion count `occ(21, σₙ)` under Luce weights.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{argument, domain, Result};
use crate::model::WeightVector;
use crate::numeric::quad::integrate_simplex;
use crate::numeric::stats::KahanSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InversionMoments {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

/// `P(label j is drawn before label i) = θⱼ / (θᵢ + θⱼ)`.
#[inline]
fn beats(w: &WeightVector, i: usize, j: usize) -> f64 {
    if w.has_underflow() {
        let l = w.logs();
        1.0 / (1.0 + (l[i] - l[j]).exp())
    } else {
        let v = w.values();
        v[j] / (v[i] + v[j])
    }
}

/// `E occ(21, σₙ) = Σ_{i<j} θⱼ / (θᵢ + θⱼ)`.
pub fn inversion_mean(weights: &WeightVector) -> f64 {
    let n = weights.len();
    ordered_sum(n, |i| {
        let mut acc = KahanSum::new();
        for j in i + 1..n {
            acc.add(beats(weights, i, j));
        }
        acc.total()
    })
}

/// `Var occ(21, σₙ)`: a pair sum plus a triple sum, `O(n³)`.
pub fn inversion_variance(weights: &WeightVector) -> Result<f64> {
    let n = weights.len();
    if n < 2 {
        return Err(argument("the inversion variance needs n >= 2"));
    }
    let pairs = ordered_sum(n, |i| {
        let mut acc = KahanSum::new();
        for j in i + 1..n {
            let s = beats(weights, i, j);
            acc.add(s * (1.0 - s));
        }
        acc.total()
    });
    let triples = ordered_sum(n, |i| {
        let mut acc = KahanSum::new();
        let mut local = [0.0; 3];
        for j in i + 1..n {
            for k in j + 1..n {
                let [a, b, c] = triple(weights, [i, j, k], &mut local);
                let sum_ab = a + b;
                let den = (sum_ab + c) * sum_ab * (a + c) * (b + c);
                if den > 0.0 {
                    acc.add(4.0 * a * b * b * c / den);
                }
            }
        }
        acc.total()
    });
    Ok(pairs + triples)
}

#[inline]
fn triple(w: &WeightVector, idx: [usize; 3], buf: &mut [f64; 3]) -> [f64; 3] {
    if w.has_underflow() {
        let l = w.logs();
        let m = l[idx[0]].max(l[idx[1]]).max(l[idx[2]]);
        for (slot, &i) in buf.iter_mut().zip(&idx) {
            *slot = (l[i] - m).exp();
        }
        *buf
    } else {
        let v = w.values();
        [v[idx[0]], v[idx[1]], v[idx[2]]]
    }
}

/// Per-index partial sums computed in parallel, added in index order.
fn ordered_sum<F: Fn(usize) -> f64 + Sync + Send>(n: usize, term: F) -> f64 {
    let parts: Vec<f64> = (0..n).into_par_iter().map(term).collect();
    parts.into_iter().sum::<KahanSum>().total()
}

pub fn inversion_moments(weights: &WeightVector) -> Result<InversionMoments> {
    Ok(InversionMoments {
        n: weights.len(),
        mean: inversion_mean(weights),
        variance: inversion_variance(weights)?,
    })
}

/// `lim E occ(21, σₙ) / n²` for `θᵢ = n - i + 1`.
pub fn sukhatme_inversion_mean_constant() -> f64 {
    (1.0 - 2f64.ln()) / 2.0
}

/// `V = ∫_{0<t<u<v<1} 4tu²v / ((t+u+v)(t+u)(t+v)(u+v))`, the limit of
/// `Var occ(21, σₙ) / n³` for `θᵢ = n - i + 1`.
pub fn sukhatme_inversion_constant() -> f64 {
    let g = |p: &[f64]| {
        let (t, u, v) = (p[0], p[1], p[2]);
        let den = (t + u + v) * (t + u) * (t + v) * (u + v);
        if den > 0.0 {
            4.0 * t * u * u * v / den
        } else {
            0.0
        }
    };
    integrate_simplex(3, &g, 1e-11)
}

/// Berry–Esseen style bound `C n⁴/a³ + C n/a + C n^{2/3}/a^{2/3}` with
/// `a = (√Var - n)⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InversionBound {
    pub a: f64,
    pub value: f64,
    /// `a = 0`: the bound is `+∞`.
    pub degenerate: bool,
}

/// The constant `c` is not known explicitly; callers choose it (1 is the
/// conventional default).
pub fn be_bound_inversions(n: u64, variance: f64, c: f64) -> Result<InversionBound> {
    if !(variance.is_finite() && variance > 0.0) {
        return Err(domain(format!("variance {variance} must be positive")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(domain(format!("constant {c} must be positive")));
    }
    let n = n as f64;
    let a = (variance.sqrt() - n).max(0.0);
    if a == 0.0 {
        return Ok(InversionBound { a, value: f64::INFINITY, degenerate: true });
    }
    let value = c * n.powi(4) / a.powi(3) + c * n / a + c * n.powf(2.0 / 3.0) / a.powf(2.0 / 3.0);
    Ok(InversionBound { a, value, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_labels() {
        let w = WeightVector::new(vec![1.0, 3.0]).unwrap();
        assert!((inversion_mean(&w) - 0.75).abs() < 1e-15);
        assert!((inversion_variance(&w).unwrap() - 3.0 / 16.0).abs() < 1e-15);
        assert!(inversion_variance(&WeightVector::uniform(1).unwrap()).is_err());
    }

    #[test]
    fn uniform_weights() {
        for n in [2usize, 5, 40] {
            let w = WeightVector::uniform(n).unwrap();
            let nf = n as f64;
            assert!((inversion_mean(&w) - nf * (nf - 1.0) / 4.0).abs() < 1e-9);
            let v = inversion_variance(&w).unwrap();
            assert!((v - nf * (nf - 1.0) * (2.0 * nf + 5.0) / 72.0).abs() < 1e-9);
        }
    }

    #[test]
    fn log_path_matches_linear_path() {
        let logs: Vec<f64> = (0..30).map(|i| -0.3 * i as f64).collect();
        let a = WeightVector::from_logs(logs.clone()).unwrap();
        let b = WeightVector::new(logs.iter().map(|l| l.exp()).collect()).unwrap();
        assert!(!a.has_underflow());
        assert!((inversion_mean(&a) - inversion_mean(&b)).abs() < 1e-12);
        let steep = WeightVector::from_logs((0..50).map(|i| -800.0 * i as f64).collect()).unwrap();
        assert!(steep.has_underflow());
        assert!(inversion_mean(&steep) < 1e-300);
        assert!(inversion_variance(&steep).unwrap() >= 0.0);
    }

    #[test]
    fn bound_shape() {
        assert!(be_bound_inversions(100, 50.0, 1.0).unwrap().degenerate);
        let small = be_bound_inversions(1000, 1e9, 1.0).unwrap().value;
        let large = be_bound_inversions(1000, 1e10, 1.0).unwrap().value;
        assert!(large < small);
        let b3 = be_bound_inversions(1000, 1e9, 1.0).unwrap().value;
        let b4 = be_bound_inversions(10_000, 1e12, 1.0).unwrap().value;
        assert!(b4 < b3);
    }
}
