//! Benchmark inputs shared by the criterion targets.

use cgomega::TwoJ;

/// Equal-momentum pairs `2J1 = 2J2 = k` used by the table benchmarks.
pub fn square_pairs() -> Vec<(TwoJ, TwoJ)> {
    [4, 12, 24, 40].into_iter().map(|k| (TwoJ::new(k), TwoJ::new(k))).collect()
}
