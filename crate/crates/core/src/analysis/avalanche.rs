//! Head-to-head avalanche comparison of two cipher variants.
//!
//! Each trial encrypts a random plaintext pair that differs in one bit (or
//! one plaintext under two keys that differ in one bit) with both variants
//! and records each variant's ciphertext Hamming distance. The comparator
//! then decides which variant showed the better avalanche for that trial.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cast::{Block64, Cast128, MasterKey, Variant, MAX_ROUNDS};
use crate::error::{Error, Result};
use crate::rng::derive_stream;

use super::hamming64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparator {
    /// The distance nearer to 32 (half the block) wins.
    #[serde(rename = "closer32")]
    CloserTo32,
    /// The larger distance wins.
    #[serde(rename = "greater")]
    Greater,
}

impl FromStr for Comparator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "closer32" | "closer_to_32" => Ok(Comparator::CloserTo32),
            "greater" => Ok(Comparator::Greater),
            other => Err(format!("unknown comparator {other:?} (expected closer32 or greater)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    FirstBetter,
    SecondBetter,
    Tie,
}

pub fn avalanche_compare(d1: u32, d2: u32, mode: Comparator) -> Outcome {
    let (s1, s2) = match mode {
        Comparator::CloserTo32 => (-(d1.abs_diff(32) as i64), -(d2.abs_diff(32) as i64)),
        Comparator::Greater => (d1 as i64, d2 as i64),
    };
    match s1.cmp(&s2) {
        std::cmp::Ordering::Greater => Outcome::FirstBetter,
        std::cmp::Ordering::Less => Outcome::SecondBetter,
        std::cmp::Ordering::Equal => Outcome::Tie,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipMode {
    Plaintext,
    Key,
}

impl fmt::Display for FlipMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlipMode::Plaintext => "plaintext",
            FlipMode::Key => "key",
        })
    }
}

impl FromStr for FlipMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "plaintext" => Ok(FlipMode::Plaintext),
            "key" => Ok(FlipMode::Key),
            other => Err(format!("unknown flip mode {other:?} (expected plaintext or key)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AvalancheConfig {
    pub mode: FlipMode,
    pub samples: usize,
    pub rounds: u32,
    pub master_key: MasterKey,
    pub seed: u64,
    pub comparator: Comparator,
    /// Key mode only: flip this bit in every trial instead of a fresh
    /// random bit per trial.
    pub fixed_key_bit: Option<usize>,
    /// Worker threads; `None` uses the global pool. Results never depend
    /// on this.
    pub workers: Option<usize>,
}

impl AvalancheConfig {
    pub fn new(mode: FlipMode, samples: usize, rounds: u32, master_key: MasterKey, seed: u64) -> Self {
        AvalancheConfig {
            mode,
            samples,
            rounds,
            master_key,
            seed,
            comparator: Comparator::CloserTo32,
            fixed_key_bit: None,
            workers: None,
        }
    }
}

/// Hamming distances observed by each variant in one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AvalancheTrial {
    pub d_original: u32,
    pub d_modified: u32,
}

/// Tally of one rounds setting. For a comparison between two arbitrary
/// variants, "original" labels the first and "modified" the second.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AvalancheTable {
    pub rounds: u32,
    pub samples: u64,
    pub wins_original: u64,
    pub wins_modified: u64,
    pub ties: u64,
    pub mean_distance_original: f64,
    pub mean_distance_modified: f64,
    pub sd_distance_original: f64,
    pub sd_distance_modified: f64,
}

impl AvalancheTable {
    pub fn win_fraction_original(&self) -> f64 {
        self.wins_original as f64 / self.samples as f64
    }

    pub fn win_fraction_modified(&self) -> f64 {
        self.wins_modified as f64 / self.samples as f64
    }

    pub fn tie_fraction(&self) -> f64 {
        self.ties as f64 / self.samples as f64
    }
}

/// Original against Modified.
pub fn avalanche_experiment(cfg: &AvalancheConfig) -> Result<AvalancheTable> {
    avalanche_experiment_between(cfg, Variant::Original, Variant::Modified)
}

pub fn avalanche_experiment_between(cfg: &AvalancheConfig, first: Variant, second: Variant) -> Result<AvalancheTable> {
    let trials = avalanche_trials(cfg, first, second)?;
    Ok(tabulate(cfg.rounds, cfg.comparator, &trials))
}

/// Per-trial distances in trial order.
pub fn avalanche_trials(cfg: &AvalancheConfig, first: Variant, second: Variant) -> Result<Vec<AvalancheTrial>> {
    if cfg.samples == 0 {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    if !(1..=MAX_ROUNDS).contains(&cfg.rounds) {
        return Err(Error::InvalidRounds(cfg.rounds));
    }
    let key_bits = cfg.master_key.bit_len();
    if let Some(bit) = cfg.fixed_key_bit {
        if bit >= key_bits {
            return Err(Error::InvalidBitIndex { index: bit, bits: key_bits });
        }
    }

    let base = [Cast128::new(&cfg.master_key, first, cfg.rounds)?, Cast128::new(&cfg.master_key, second, cfg.rounds)?];
    let fixed_flip = match cfg.fixed_key_bit {
        Some(bit) => {
            let k = cfg.master_key.with_bit_flipped(bit)?;
            Some([Cast128::new(&k, first, cfg.rounds)?, Cast128::new(&k, second, cfg.rounds)?])
        }
        None => None,
    };

    let trial = |i: usize| -> AvalancheTrial {
        let mut rng = derive_stream(cfg.seed, i as u64);
        let plain = Block64::from_u64(rng.next_u64());
        let [d_original, d_modified] = match cfg.mode {
            FlipMode::Plaintext => {
                let flipped = Block64::from_u64(plain.to_u64() ^ (1u64 << rng.below(64)));
                base.each_ref().map(|c| hamming64(c.encrypt(plain), c.encrypt(flipped)))
            }
            FlipMode::Key => {
                let flipped = match &fixed_flip {
                    Some(pair) => pair.clone(),
                    None => {
                        let k = cfg.master_key.with_bit_flipped(rng.below(key_bits)).expect("bit in range");
                        [first, second].map(|v| Cast128::new(&k, v, cfg.rounds).expect("rounds checked"))
                    }
                };
                [0, 1].map(|j| hamming64(base[j].encrypt(plain), flipped[j].encrypt(plain)))
            }
        };
        AvalancheTrial { d_original, d_modified }
    };

    let run = || (0..cfg.samples).into_par_iter().map(trial).collect::<Vec<_>>();
    match cfg.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().expect("thread pool");
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Tallies outcomes and distance moments (population standard deviation).
pub fn tabulate(rounds: u32, comparator: Comparator, trials: &[AvalancheTrial]) -> AvalancheTable {
    let (mut wins_original, mut wins_modified, mut ties) = (0u64, 0u64, 0u64);
    let (mut sum_o, mut sum_m, mut sq_o, mut sq_m) = (0u64, 0u64, 0u64, 0u64);
    for t in trials {
        match avalanche_compare(t.d_original, t.d_modified, comparator) {
            Outcome::FirstBetter => wins_original += 1,
            Outcome::SecondBetter => wins_modified += 1,
            Outcome::Tie => ties += 1,
        }
        sum_o += t.d_original as u64;
        sum_m += t.d_modified as u64;
        sq_o += (t.d_original * t.d_original) as u64;
        sq_m += (t.d_modified * t.d_modified) as u64;
    }
    let n = trials.len() as f64;
    let moments = |sum: u64, sq: u64| {
        let mean = sum as f64 / n;
        (mean, (sq as f64 / n - mean * mean).max(0.0).sqrt())
    };
    let (mean_o, sd_o) = moments(sum_o, sq_o);
    let (mean_m, sd_m) = moments(sum_m, sq_m);
    AvalancheTable {
        rounds,
        samples: trials.len() as u64,
        wins_original,
        wins_modified,
        ties,
        mean_distance_original: mean_o,
        mean_distance_modified: mean_m,
        sd_distance_original: sd_o,
        sd_distance_modified: sd_m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> MasterKey {
        MasterKey::from_hex("ADF278565E262AD1F5DEC94A0BF25B27").unwrap()
    }

    // P(|d - 32| = k) for d ~ Binomial(64, 1/2), via exact binomial terms.
    fn folded_binomial() -> Vec<f64> {
        let mut pmf = vec![0.0f64; 65];
        let mut c = 1.0f64;
        for (k, p) in pmf.iter_mut().enumerate() {
            *p = c / 2f64.powi(64);
            c = c * (64 - k) as f64 / (k + 1) as f64;
        }
        (0..=32).map(|k| if k == 0 { pmf[32] } else { pmf[32 - k] + pmf[32 + k] }).collect()
    }

    #[test]
    fn comparator_examples() {
        assert_eq!(avalanche_compare(32, 30, Comparator::CloserTo32), Outcome::FirstBetter);
        assert_eq!(avalanche_compare(30, 34, Comparator::CloserTo32), Outcome::Tie);
        assert_eq!(avalanche_compare(30, 34, Comparator::Greater), Outcome::SecondBetter);
        assert_eq!(avalanche_compare(40, 31, Comparator::CloserTo32), Outcome::SecondBetter);
    }

    #[test]
    fn folded_binomial_tie_rate() {
        let tie: f64 = folded_binomial().iter().map(|p| p * p).sum();
        assert!((tie - 0.130_902_406_859_771_1).abs() < 1e-12, "{tie}");
    }

    #[test]
    fn self_comparison_is_all_ties() {
        let mut cfg = AvalancheConfig::new(FlipMode::Plaintext, 500, 16, key(), 1);
        for v in Variant::ALL {
            let t = avalanche_experiment_between(&cfg, v, v).unwrap();
            assert_eq!(t.ties, 500);
        }
        cfg.mode = FlipMode::Key;
        let t = avalanche_experiment_between(&cfg, Variant::Modified, Variant::Modified).unwrap();
        assert_eq!(t.ties, 500);
    }

    #[test]
    fn tallies_conserve_samples() {
        for mode in [FlipMode::Plaintext, FlipMode::Key] {
            let cfg = AvalancheConfig::new(mode, 777, 4, key(), 9);
            let t = avalanche_experiment(&cfg).unwrap();
            assert_eq!(t.wins_original + t.wins_modified + t.ties, 777);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut cfg = AvalancheConfig::new(FlipMode::Key, 2000, 16, key(), 3);
        cfg.workers = Some(1);
        let one = avalanche_experiment(&cfg).unwrap();
        cfg.workers = Some(8);
        assert_eq!(one, avalanche_experiment(&cfg).unwrap());
    }

    #[test]
    fn input_validation() {
        let mut cfg = AvalancheConfig::new(FlipMode::Key, 10, 0, key(), 0);
        assert!(matches!(avalanche_experiment(&cfg), Err(Error::InvalidRounds(0))));
        cfg.rounds = 16;
        cfg.fixed_key_bit = Some(128);
        assert!(matches!(avalanche_experiment(&cfg), Err(Error::InvalidBitIndex { .. })));
        cfg.fixed_key_bit = Some(127);
        assert!(avalanche_experiment(&cfg).is_ok());
        cfg.samples = 0;
        assert!(matches!(avalanche_experiment(&cfg), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn fixed_key_bit_is_used() {
        let mut cfg = AvalancheConfig::new(FlipMode::Key, 50, 1, key(), 0);
        cfg.fixed_key_bit = Some(0);
        let trials = avalanche_trials(&cfg, Variant::Original, Variant::Modified).unwrap();
        let flipped = key().with_bit_flipped(0).unwrap();
        let a = Cast128::new(&key(), Variant::Original, 1).unwrap();
        let b = Cast128::new(&flipped, Variant::Original, 1).unwrap();
        for (i, t) in trials.iter().enumerate() {
            let p = Block64::from_u64(derive_stream(0, i as u64).next_u64());
            assert_eq!(t.d_original, hamming64(a.encrypt(p), b.encrypt(p)));
        }
    }

    #[test]
    fn tabulate_moments() {
        let trials =
            [AvalancheTrial { d_original: 30, d_modified: 32 }, AvalancheTrial { d_original: 34, d_modified: 32 }];
        let t = tabulate(16, Comparator::CloserTo32, &trials);
        assert_eq!((t.wins_original, t.wins_modified, t.ties), (0, 2, 0));
        assert_eq!(t.mean_distance_original, 32.0);
        assert_eq!(t.sd_distance_original, 2.0);
        assert_eq!(t.sd_distance_modified, 0.0);
    }
}
