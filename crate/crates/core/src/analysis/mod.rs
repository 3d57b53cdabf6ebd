//! Security evaluation battery: avalanche comparison, encryption quality,
//! key sensitivity, histogram uniformity and adjacent-pixel correlation.

mod avalanche;
mod correlation;
mod keysens;
mod quality;
mod uniformity;

pub use avalanche::{
    avalanche_compare, avalanche_experiment, avalanche_experiment_between, avalanche_trials, tabulate, AvalancheConfig,
    AvalancheTable, AvalancheTrial, Comparator, FlipMode, Outcome,
};
pub use correlation::{
    correlation_coefficient, pearson, sample_adjacent_pairs, Adjacency, CorrelationSample, DEFAULT_PAIRS,
};
pub use keysens::{
    difference_image, difference_image_with, key_sensitivity, percent_differing, DiffMode, KeySensitivityReport,
    KeySensitivitySummary, DEFAULT_KEY1, DEFAULT_KEY2,
};
pub use quality::{encryption_quality, eq_vs_rounds, EqPoint};
pub use uniformity::{chi_square_sf, histogram_uniformity, UniformityReport};

use crate::cast::Block64;

/// Number of differing bits between two blocks.
pub fn hamming64(a: Block64, b: Block64) -> u32 {
    (a.to_u64() ^ b.to_u64()).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_examples() {
        let x = Block64::from_u64(0x0123_4567_89ab_cdef);
        assert_eq!(hamming64(x, x), 0);
        assert_eq!(hamming64(Block64::from_u64(0), Block64::from_u64(u64::MAX)), 64);
        assert_eq!(hamming64(Block64::new(0, 1), Block64::new(0, 3)), 1);
    }
}
