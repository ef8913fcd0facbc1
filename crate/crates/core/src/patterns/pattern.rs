use std::fmt;
use std::str::FromStr;

use crate::error::{argument, capacity, Error, Result};
use crate::model::Permutation;

/// Largest supported pattern size.
pub const MAX_PATTERN: usize = 8;

/// A small permutation `π ∈ S_k`, `1 ≤ k ≤ 8`, used as a query.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(Vec<u8>);

impl Pattern {
    pub fn new(oneline: Vec<u8>) -> Result<Self> {
        let k = oneline.len();
        if k == 0 {
            return Err(argument("pattern must have at least one entry"));
        }
        if k > MAX_PATTERN {
            return Err(capacity(format!("pattern size {k} exceeds {MAX_PATTERN}")));
        }
        let mut seen = [false; MAX_PATTERN];
        for &v in &oneline {
            let v = v as usize;
            if v == 0 || v > k || std::mem::replace(&mut seen[v - 1], true) {
                return Err(argument(format!("{oneline:?} is not a permutation of 1..={k}")));
            }
        }
        Ok(Pattern(oneline))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn inverse(&self) -> Pattern {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i as u8 + 1;
        }
        Pattern(inv)
    }

    pub fn reversed(&self) -> Pattern {
        Pattern(self.0.iter().rev().copied().collect())
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_vec_unchecked(self.0.iter().map(|&v| v as u32).collect())
    }

    /// All of `S_k` in lexicographic order.
    pub fn all(k: usize) -> Result<Vec<Pattern>> {
        if k == 0 || k > MAX_PATTERN {
            return Err(capacity(format!("pattern size must be in 1..={MAX_PATTERN}")));
        }
        let mut cur: Vec<u8> = (1..=k as u8).collect();
        let mut out = vec![Pattern(cur.clone())];
        while next_permutation(&mut cur) {
            out.push(Pattern(cur.clone()));
        }
        Ok(out)
    }
}

pub(crate) fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

impl serde::Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Accepts `"132"`, `"1 3 2"` or `"1,3,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let digits: Vec<u8> = if s.contains(|c: char| c == ',' || c.is_whitespace()) {
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u8>().map_err(|_| argument(format!("bad pattern entry {t:?}"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| argument(format!("bad pattern {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        Pattern::new(digits)
    }
}

/// The order-isomorphic pattern of distinct values.
pub fn standardize(values: &[f64]) -> Result<Pattern> {
    if values.len() > MAX_PATTERN {
        return Err(capacity(format!("at most {MAX_PATTERN} values")));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(argument("NaN cannot be standardized"));
    }
    let ranks = rank_values(values, |a, b| a.total_cmp(b))?;
    Pattern::new(ranks.into_iter().map(|r| r as u8).collect())
}

/// Standardization of a word of any length, as a permutation.
pub fn standardize_word(values: &[u32]) -> Result<Permutation> {
    let ranks = rank_values(values, |a, b| a.cmp(b))?;
    Permutation::new(ranks.into_iter().map(|r| r as u32).collect())
}

fn rank_values<T, C: Fn(&T, &T) -> std::cmp::Ordering>(values: &[T], cmp: C) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| cmp(&values[a], &values[b]));
    if idx.windows(2).any(|w| cmp(&values[w[0]], &values[w[1]]).is_eq()) {
        return Err(argument("values to standardize must be distinct"));
    }
    let mut ranks = vec![0; values.len()];
    for (r, &i) in idx.iter().enumerate() {
        ranks[i] = r + 1;
    }
    Ok(ranks)
}

/// `pat_I(σ)`: the pattern formed by `σ(i)`, `i ∈ I` (1-based, increasing).
pub fn pat_at(sigma: &Permutation, indices: &[usize]) -> Result<Pattern> {
    let n = sigma.len();
    if indices.is_empty() {
        return Err(argument("index set must be non-empty"));
    }
    if let Some(&i) = indices.iter().find(|&&i| i == 0 || i > n) {
        return Err(argument(format!("index {i} outside 1..={n}")));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(argument("indices must be strictly increasing"));
    }
    let vals: Vec<f64> = indices.iter().map(|&i| sigma.at(i) as f64).collect();
    standardize(&vals)
}
