use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::error::{argument, capacity, Result};
use crate::model::Permutation;
use crate::numeric::stats::Estimate;
use crate::patterns::Pattern;

/// Largest number of index subsets [`occ_exact`] will visit.
pub const OCC_GUARD: u128 = 1_000_000_000;

/// A pattern count with its normalizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountResult {
    pub count: u64,
    pub normalizer: u128,
    pub proportion: f64,
}

impl CountResult {
    fn new(count: u64, normalizer: u128) -> Self {
        CountResult { count, normalizer, proportion: count as f64 / normalizer as f64 }
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn check_size(pi: &Pattern, sigma: &Permutation) -> Result<()> {
    if pi.len() > sigma.len() {
        return Err(argument(format!(
            "pattern of size {} longer than permutation of size {}",
            pi.len(),
            sigma.len()
        )));
    }
    Ok(())
}

/// Number of inversions `#{i < j : σ(i) > σ(j)}` with a Fenwick tree.
pub fn count_inversions(sigma: &Permutation) -> u64 {
    let n = sigma.len();
    let mut tree = vec![0u32; n + 1];
    let mut inv = 0u64;
    for (seen, &v) in sigma.as_slice().iter().enumerate() {
        let mut i = v as usize;
        let mut below = 0u64;
        while i > 0 {
            below += tree[i] as u64;
            i &= i - 1;
        }
        inv += seen as u64 - below;
        let mut i = v as usize;
        while i <= n {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    inv
}

/// Exact `occ(π, σ)` with normalizer `C(n, k)`.
///
/// Patterns of size 2 use inversion counting. Larger patterns enumerate
/// index subsets with pruning and refuse to visit more than [`OCC_GUARD`];
/// use [`occ_estimate`] beyond that.
pub fn occ_exact(pi: &Pattern, sigma: &Permutation) -> Result<CountResult> {
    check_size(pi, sigma)?;
    let n = sigma.len() as u64;
    let k = pi.len();
    let total = binomial(n, k as u64);
    let count = match pi.as_slice() {
        [1] => n,
        [2, 1] => count_inversions(sigma),
        [1, 2] => (total as u64) - count_inversions(sigma),
        p => {
            if total > OCC_GUARD {
                return Err(capacity(format!(
                    "C({n},{k}) = {total} subsets exceeds the exact-count guard of {OCC_GUARD}; use occ_estimate"
                )));
            }
            let mut chosen = [0u32; 8];
            count_from(p, sigma.as_slice(), 0, 0, &mut chosen)
        }
    };
    Ok(CountResult::new(count, total))
}

fn count_from(p: &[u8], s: &[u32], level: usize, start: usize, chosen: &mut [u32; 8]) -> u64 {
    let k = p.len();
    if level == k {
        return 1;
    }
    let mut hits = 0;
    for i in start..=s.len() - (k - level) {
        let v = s[i];
        let consistent = (0..level).all(|l| (chosen[l] < v) == (p[l] < p[level]));
        if consistent {
            chosen[level] = v;
            hits += count_from(p, s, level + 1, i + 1, chosen);
        }
    }
    hits
}

/// Monte Carlo estimate of `õcc(π, σ)` from uniform random `k`-subsets.
pub fn occ_estimate<R: Rng + ?Sized>(
    pi: &Pattern,
    sigma: &Permutation,
    samples: u64,
    rng: &mut R,
) -> Result<Estimate> {
    check_size(pi, sigma)?;
    if samples == 0 {
        return Err(argument("samples must be at least 1"));
    }
    let (n, k) = (sigma.len(), pi.len());
    let s = sigma.as_slice();
    let p = pi.as_slice();
    let mut idx = [0usize; 8];
    let mut hits = 0u64;
    for _ in 0..samples {
        for (slot, i) in idx.iter_mut().zip(index::sample(rng, n, k)) {
            *slot = i;
        }
        idx[..k].sort_unstable();
        let ok = (0..k).all(|a| (a + 1..k).all(|b| (s[idx[a]] < s[idx[b]]) == (p[a] < p[b])));
        hits += ok as u64;
    }
    Ok(Estimate::from_hits(hits, samples))
}

/// Consecutive occurrences: windows `i+1..i+k` that induce `π`.
///
/// The proportion is taken over the `n-k+1` windows.
pub fn cocc(pi: &Pattern, sigma: &Permutation) -> Result<CountResult> {
    check_size(pi, sigma)?;
    let n = sigma.len();
    let k = pi.len();
    let s = sigma.as_slice();
    let chain: Vec<usize> = pi.inverse().as_slice().iter().map(|&v| v as usize - 1).collect();
    let count = (0..=n - k)
        .filter(|&i| chain.windows(2).all(|w| s[i + w[0]] < s[i + w[1]]))
        .count() as u64;
    Ok(CountResult::new(count, (n - k + 1) as u128))
}

/// Fixed points and cycle type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleStats {
    pub fixed_points: usize,
    /// Cycle length → multiplicity.
    pub cycle_type: BTreeMap<usize, usize>,
}

pub fn cycle_stats(sigma: &Permutation) -> CycleStats {
    let s = sigma.as_slice();
    let mut seen = vec![false; s.len()];
    let mut cycle_type = BTreeMap::new();
    for start in 0..s.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = s[i] as usize - 1;
            len += 1;
        }
        *cycle_type.entry(len).or_insert(0) += 1;
    }
    let fixed_points = cycle_type.get(&1).copied().unwrap_or(0);
    CycleStats { fixed_points, cycle_type }
}

/// `#{i : σ(i) = i}` without the full cycle decomposition.
pub fn fixed_points(sigma: &Permutation) -> usize {
    sigma.as_slice().iter().enumerate().filter(|(i, &v)| v as usize == i + 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rng_stream;

    fn perm(s: &str) -> Permutation {
        Permutation::new(s.chars().map(|c| c.to_digit(10).unwrap()).collect()).unwrap()
    }
    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn inversions() {
        assert_eq!(count_inversions(&Permutation::identity(50)), 0);
        assert_eq!(count_inversions(&Permutation::decreasing(50)), 50 * 49 / 2);
        assert_eq!(count_inversions(&perm("31524")), 4);
    }

    #[test]
    fn occ_examples() {
        let n = 12;
        assert_eq!(occ_exact(&pat("21"), &Permutation::identity(n)).unwrap().count, 0);
        assert_eq!(occ_exact(&pat("21"), &Permutation::decreasing(n)).unwrap().count, 66);
        assert!(occ_exact(&pat("1423"), &perm("1532467")).unwrap().count >= 1);
        assert_eq!(occ_exact(&pat("321"), &Permutation::decreasing(6)).unwrap().count, 20);
        assert!(occ_exact(&pat("1234"), &Permutation::identity(3)).is_err());
    }

    #[test]
    fn occ_guard() {
        let big = Permutation::identity(2000);
        assert!(matches!(occ_exact(&pat("123"), &big), Err(crate::Error::Capacity(_))));
        assert_eq!(occ_exact(&pat("12"), &big).unwrap().count, 2000 * 1999 / 2);
    }

    #[test]
    fn cocc_examples() {
        let r = cocc(&pat("321"), &perm("1532467")).unwrap();
        assert_eq!((r.count, r.normalizer), (1, 5));
        assert_eq!(cocc(&pat("21"), &Permutation::decreasing(9)).unwrap().count, 8);
    }

    #[test]
    fn estimate_trivial_cases() {
        let mut rng = rng_stream(0, 0);
        let e = occ_estimate(&pat("12"), &Permutation::identity(30), 500, &mut rng).unwrap();
        assert_eq!((e.value, e.stderr), (1.0, 0.0));
        let e = occ_estimate(&pat("12"), &Permutation::decreasing(30), 500, &mut rng).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn cycles() {
        let c = cycle_stats(&Permutation::identity(5));
        assert_eq!(c.fixed_points, 5);
        assert_eq!(c.cycle_type.get(&1), Some(&5));
        let c = cycle_stats(&perm("321"));
        assert_eq!(c.fixed_points, 1);
        assert_eq!(c.cycle_type.into_iter().collect::<Vec<_>>(), vec![(1, 1), (2, 1)]);
        assert_eq!(fixed_points(&perm("321")), 1);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(100_000, 8), 247_946_436_557_053_588_216_440_181_812_487_500);
    }
}
