use rand::Rng;
use rand_distr::Exp1;

use crate::model::{Permutation, WeightVector};

/// Below this total the remaining leaves are rebuilt from the log-weights.
const REBUILD_BELOW: f64 = 1e-200;

/// Complete binary tree of partial sums over the remaining weights.
///
/// Removal zeroes a leaf and recomputes its ancestors from their children,
/// so no subtraction error accumulates along a long sequence of draws.
struct SumTree {
    leaves: usize,
    node: Vec<f64>,
}

impl SumTree {
    fn new(values: &[f64]) -> Self {
        let leaves = values.len().next_power_of_two();
        let mut node = vec![0.0; 2 * leaves];
        node[leaves..leaves + values.len()].copy_from_slice(values);
        for i in (1..leaves).rev() {
            node[i] = node[2 * i] + node[2 * i + 1];
        }
        SumTree { leaves, node }
    }

    fn total(&self) -> f64 {
        self.node[1]
    }

    fn set(&mut self, leaf: usize, value: f64) {
        let mut i = leaf + self.leaves;
        self.node[i] = value;
        while i > 1 {
            i /= 2;
            self.node[i] = self.node[2 * i] + self.node[2 * i + 1];
        }
    }

    /// Leaf whose cumulative interval contains `u ∈ [0, total)`.
    fn find(&self, mut u: f64) -> usize {
        let mut i = 1;
        while i < self.leaves {
            let left = self.node[2 * i];
            let right = self.node[2 * i + 1];
            if (u < left && left > 0.0) || right <= 0.0 {
                i *= 2;
            } else {
                u -= left;
                i = 2 * i + 1;
            }
        }
        i - self.leaves
    }
}

/// Draws labels one at a time, each with probability proportional to its
/// weight among those not yet drawn. `O(n log n)`.
pub fn sample_luce_sequential<R: Rng + ?Sized>(weights: &WeightVector, rng: &mut R) -> Permutation {
    let n = weights.len();
    let mut tree = SumTree::new(weights.values());
    let mut drawn = vec![false; n];
    let mut sigma = vec![0u32; n];
    for step in 1..=n {
        if tree.total() < REBUILD_BELOW {
            rebuild(&mut tree, weights.logs(), &drawn);
        }
        let u = rng.random::<f64>() * tree.total();
        let label = tree.find(u);
        debug_assert!(!drawn[label]);
        drawn[label] = true;
        tree.set(label, 0.0);
        sigma[label] = step as u32;
    }
    Permutation::from_vec_unchecked(sigma)
}

fn rebuild(tree: &mut SumTree, logs: &[f64], drawn: &[bool]) {
    let max = logs
        .iter()
        .zip(drawn)
        .filter(|(_, d)| !**d)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let values: Vec<f64> = logs
        .iter()
        .zip(drawn)
        .map(|(l, d)| if *d { 0.0 } else { (l - max).exp() })
        .collect();
    *tree = SumTree::new(&values);
}

/// Exponential race: label `i` gets a clock `Eᵢ ~ Exp(θᵢ)` and `σ(i)` is the
/// rank of `Eᵢ`. Clocks are compared as `ln E − ln θ` so any weight span is
/// safe. Exact ties (a probability-zero event) go to the smaller label.
pub fn sample_luce_race<R: Rng + ?Sized>(weights: &WeightVector, rng: &mut R) -> Permutation {
    let keys: Vec<f64> = weights
        .logs()
        .iter()
        .map(|l| {
            let e: f64 = rng.sample(Exp1);
            e.ln() - l
        })
        .collect();
    ranks_of(&keys)
}

/// `σ(i) = #{j : keys[j] ≤ keys[i]}`, ties broken by index.
pub(crate) fn ranks_of(keys: &[f64]) -> Permutation {
    let mut order: Vec<u32> = (0..keys.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| keys[a as usize].total_cmp(&keys[b as usize]).then(a.cmp(&b)));
    let mut sigma = vec![0u32; keys.len()];
    for (rank, &i) in order.iter().enumerate() {
        sigma[i as usize] = rank as u32 + 1;
    }
    Permutation::from_vec_unchecked(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rng_stream;

    #[test]
    fn singleton() {
        let w = WeightVector::new(vec![2.5]).unwrap();
        let mut rng = rng_stream(1, 0);
        assert_eq!(sample_luce_sequential(&w, &mut rng).as_slice(), &[1]);
        assert_eq!(sample_luce_race(&w, &mut rng).as_slice(), &[1]);
    }

    #[test]
    fn tree_find_skips_removed() {
        let mut t = SumTree::new(&[1.0, 2.0, 3.0]);
        t.set(1, 0.0);
        assert_eq!(t.find(0.5), 0);
        assert_eq!(t.find(1.0), 2);
        assert_eq!(t.find(3.9), 2);
        assert_eq!(t.total(), 4.0);
    }

    #[test]
    fn steep_weights_draw_in_order() {
        // θᵢ = 2^{-50 i}: the draw order is the identity with overwhelming probability
        let w = WeightVector::from_logs((0..400).map(|i| -50.0 * i as f64 * 2f64.ln()).collect()).unwrap();
        let mut rng = rng_stream(3, 0);
        assert_eq!(sample_luce_sequential(&w, &mut rng), Permutation::identity(400));
        assert_eq!(sample_luce_race(&w, &mut rng), Permutation::identity(400));
    }

    #[test]
    fn ties_go_to_smaller_index() {
        assert_eq!(ranks_of(&[1.0, 0.5, 1.0]).as_slice(), &[2, 1, 3]);
    }
}
