use std::fmt;
use std::str::FromStr;

use crate::error::{argument, Error, Result};

/// A permutation `σ` of `[n]` in one-line notation (1-based values).
///
/// For a Luce sample, `σ(i)` is the step at which label `i` is drawn and
/// [`inverse`](Permutation::inverse) gives the draw order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    /// Validates that `oneline` is a bijection of `[n]`, `n ≥ 1`.
    pub fn new(oneline: Vec<u32>) -> Result<Self> {
        let n = oneline.len();
        if n == 0 {
            return Err(argument("permutation must have at least one entry"));
        }
        let mut seen = vec![false; n];
        for (i, &v) in oneline.iter().enumerate() {
            let v = v as usize;
            if v == 0 || v > n {
                return Err(argument(format!("entry {} is {v}, outside 1..={n}", i + 1)));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(argument(format!("value {v} appears more than once")));
            }
        }
        Ok(Permutation(oneline))
    }

    /// Wraps a vector already known to be a bijection.
    pub(crate) fn from_vec_unchecked(oneline: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(oneline.clone()).is_ok());
        Permutation(oneline)
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    /// `n n-1 … 1`.
    pub fn decreasing(n: usize) -> Self {
        Permutation((1..=n as u32).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// `σ(i)` for 1-based `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Permutation(inv)
    }

    /// The reversed one-line word `σ(n) … σ(1)`.
    pub fn reversed(&self) -> Permutation {
        Permutation(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Whitespace-separated integers.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| argument(format!("not a positive integer: {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(values)
    }
}
