//! Classical and consecutive pattern statistics.

mod count;
mod pattern;

pub use count::{
    binomial, cocc, count_inversions, cycle_stats, fixed_points, occ_estimate, occ_exact, CountResult,
    CycleStats, OCC_GUARD,
};
pub use pattern::{pat_at, standardize, standardize_word, Pattern, MAX_PATTERN};
