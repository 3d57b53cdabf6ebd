//! SplitMix64 with per-trial derived streams.
//!
//! Experiments draw trial `i` from `derive_stream(seed, i)`, so results do
//! not depend on how trials are spread across worker threads.

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngState {
    pub state: u64,
}

impl RngState {
    pub const fn new(seed: u64) -> Self {
        RngState { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`, by rejection of the biased low zone.
    pub fn rand_below(&mut self, bound: u64) -> Result<u64> {
        if bound == 0 {
            return Err(Error::ZeroBound);
        }
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return Ok(x % bound);
            }
        }
    }

    /// [`rand_below`](Self::rand_below) for a bound known to be non-zero.
    pub(crate) fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        self.rand_below(bound as u64).expect("non-zero bound") as usize
    }
}

/// Functional form: returns the output and the advanced state.
pub fn next_u64(s: RngState) -> (u64, RngState) {
    let mut s = s;
    let v = s.next_u64();
    (v, s)
}

pub fn rand_below(s: RngState, bound: u64) -> Result<(u64, RngState)> {
    let mut s = s;
    let v = s.rand_below(bound)?;
    Ok((v, s))
}

pub fn derive_stream(master_seed: u64, stream_id: u64) -> RngState {
    let mut s = RngState::new(master_seed ^ stream_id.wrapping_mul(GOLDEN_GAMMA));
    RngState::new(s.next_u64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_outputs() {
        let mut s = RngState::new(0);
        assert_eq!(s.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(s.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(s.next_u64(), 0x06C4_5D18_8009_454F);
        assert_eq!(next_u64(RngState::new(1)).0, 0x910A_2DEC_8902_5CC1);
        assert_eq!(next_u64(RngState::new(2)).0, 0x9758_35DE_1C97_56CE);
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        assert_eq!(derive_stream(42, 7), derive_stream(42, 7));
        assert_ne!(derive_stream(42, 0), derive_stream(42, 1));
        let a: Vec<u64> = (0..5).scan(RngState::new(9), |s, _| Some(s.next_u64())).collect();
        let b: Vec<u64> = (0..5).scan(RngState::new(9), |s, _| Some(s.next_u64())).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn rand_below_edges() {
        let mut s = RngState::new(3);
        assert!(matches!(s.rand_below(0), Err(Error::ZeroBound)));
        assert!((0..1000).all(|_| s.rand_below(1).unwrap() == 0));
        assert!((0..1000).all(|_| s.rand_below(1 << 32).unwrap() < 1 << 32));
    }

    #[test]
    fn rand_below_64_is_uniform() {
        let n = 100_000u64;
        let mut counts = [0u64; 64];
        let mut s = RngState::new(12345);
        for _ in 0..n {
            counts[s.rand_below(64).unwrap() as usize] += 1;
        }
        let p = 1.0 / 64.0;
        let mean = n as f64 * p;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        for (v, &c) in counts.iter().enumerate() {
            assert!((c as f64 - mean).abs() <= 5.0 * sd, "value {v}: {c}");
        }
    }
}
