//! Timing of the round function and of whole-block ECB encryption.
//!
//! The round-function benchmark feeds every output back in as the next
//! `r_prev`, so consecutive calls cannot overlap and the measured time is
//! the latency of one call, including the depth of its S-box combining
//! step. Timed work is repeated in interleaved batches (original, modified,
//! original, ...) and the median batch is reported.

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use crate::cast::{round_function, Block64, Cast128, MasterKey, RoundKeys, Variant};
use crate::error::Result;
use crate::rng::RngState;

/// Timed batches per measurement.
pub const BATCHES: usize = 5;
/// Spread between fastest and slowest batch above which a run is flagged.
pub const UNSTABLE_SPREAD: f64 = 0.20;
/// Reference improvement reported for the modified round function.
pub const REFERENCE_IMPROVEMENT: f64 = 0.20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    RoundFunction,
    BlockEncrypt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub variant: Variant,
    pub op_kind: OpKind,
    /// Operations per timed batch.
    pub iterations: u64,
    pub total_time_ns: u64,
    pub ns_per_op: f64,
    pub throughput_mb_s: Option<f64>,
    /// Original time over modified time; above 1 means modified is faster.
    pub speedup_modified_vs_original: Option<f64>,
    pub checksum: u64,
    /// Batch times spread by more than [`UNSTABLE_SPREAD`].
    pub unstable: bool,
}

fn keys_from_seed(seed: u64) -> (MasterKey, RoundKeys, u32) {
    let mut rng = RngState::new(seed);
    let mut k = [0u8; 16];
    for chunk in k.chunks_mut(8) {
        chunk.copy_from_slice(&rng.next_u64().to_be_bytes());
    }
    let key = MasterKey::new(&k).expect("16-byte key");
    let start = rng.next_u64() as u32;
    (key, RoundKeys::new(&key), start)
}

#[inline(always)]
fn chain<const MODIFIED: bool>(keys: &RoundKeys, mut x: u32, passes: u64) -> u32 {
    let variant = if MODIFIED { Variant::Modified } else { Variant::Original };
    for _ in 0..passes {
        for i in 0..16 {
            x = round_function(i + 1, variant, keys.km[i], u32::from(keys.kr[i]), x);
        }
    }
    x
}

#[inline(never)]
fn run_chain(variant: Variant, keys: &RoundKeys, x: u32, passes: u64) -> u32 {
    match variant {
        Variant::Original => chain::<false>(keys, x, passes),
        Variant::Modified => chain::<true>(keys, x, passes),
    }
}

/// Untimed result of the chained round-function workload: `iterations`
/// calls (rounded up to a multiple of 16) cycling through rounds 1..=16.
pub fn round_function_chain(variant: Variant, iterations: u64, seed: u64) -> u32 {
    let (_, keys, start) = keys_from_seed(seed);
    let mut x = start;
    for _ in 0..iterations.div_ceil(16) {
        for i in 0..16 {
            x = round_function(i + 1, variant, keys.km[i], u32::from(keys.kr[i]), x);
        }
    }
    x
}

struct Batches {
    times: Vec<u64>,
}

impl Batches {
    fn median(&self) -> u64 {
        let mut t = self.times.clone();
        t.sort_unstable();
        t[t.len() / 2]
    }

    fn unstable(&self) -> bool {
        let lo = *self.times.iter().min().unwrap() as f64;
        let hi = *self.times.iter().max().unwrap() as f64;
        lo > 0.0 && (hi - lo) / lo > UNSTABLE_SPREAD
    }
}

fn time_chain(variant: Variant, keys: &RoundKeys, start: u32, passes: u64) -> (u64, u32) {
    let t0 = Instant::now();
    let out = run_chain(variant, black_box(keys), black_box(start), black_box(passes));
    let elapsed = t0.elapsed().as_nanos() as u64;
    (elapsed.max(1), black_box(out))
}

fn round_report(variant: Variant, iterations: u64, batches: &Batches, checksum: u32) -> BenchReport {
    let median = batches.median();
    BenchReport {
        variant,
        op_kind: OpKind::RoundFunction,
        iterations,
        total_time_ns: batches.times.iter().sum(),
        ns_per_op: median as f64 / iterations as f64,
        throughput_mb_s: None,
        speedup_modified_vs_original: None,
        checksum: u64::from(checksum),
        unstable: batches.unstable(),
    }
}

pub fn bench_round_function(variant: Variant, iterations: u64, seed: u64) -> BenchReport {
    let (_, keys, start) = keys_from_seed(seed);
    let passes = iterations.max(1).div_ceil(16);
    run_chain(variant, &keys, start, (passes / 10).max(1));
    let mut batches = Batches { times: Vec::with_capacity(BATCHES) };
    let mut checksum = 0;
    for _ in 0..BATCHES {
        let (t, out) = time_chain(variant, &keys, start, passes);
        batches.times.push(t);
        checksum = out;
    }
    round_report(variant, passes * 16, &batches, checksum)
}

/// Times both variants in alternating batches and fills in the speedup.
pub fn compare_round_function(iterations: u64, seed: u64) -> [BenchReport; 2] {
    let (_, keys, start) = keys_from_seed(seed);
    let passes = iterations.max(1).div_ceil(16);
    for v in Variant::ALL {
        run_chain(v, &keys, start, (passes / 10).max(1));
    }
    let mut batches = [Batches { times: vec![] }, Batches { times: vec![] }];
    let mut checksums = [0u32; 2];
    for _ in 0..BATCHES {
        for (j, v) in Variant::ALL.into_iter().enumerate() {
            let (t, out) = time_chain(v, &keys, start, passes);
            batches[j].times.push(t);
            checksums[j] = out;
        }
    }
    let mut reports = [0, 1].map(|j| round_report(Variant::ALL[j], passes * 16, &batches[j], checksums[j]));
    let speedup = reports[0].ns_per_op / reports[1].ns_per_op;
    for r in &mut reports {
        r.speedup_modified_vs_original = Some(speedup);
    }
    reports
}

const MIB: usize = 1 << 20;

fn block_buffer(megabytes: usize, seed: u64) -> Vec<u8> {
    let mut rng = RngState::new(seed ^ 0xB10C);
    let mut buf = vec![0u8; megabytes.max(1) * MIB];
    for chunk in buf.chunks_exact_mut(8) {
        chunk.copy_from_slice(&rng.next_u64().to_le_bytes());
    }
    buf
}

fn encrypt_in_place(cipher: &Cast128, buf: &mut [u8]) {
    for block in buf.chunks_exact_mut(8) {
        let b = Block64::from_bytes(block.try_into().unwrap());
        block.copy_from_slice(&cipher.encrypt(b).to_bytes());
    }
}

fn fold_checksum(buf: &[u8]) -> u64 {
    buf.chunks_exact(8).fold(0u64, |acc, w| acc.rotate_left(7) ^ u64::from_le_bytes(w.try_into().unwrap()))
}

/// Untimed checksum of the block benchmark's ciphertext.
pub fn block_encrypt_checksum(variant: Variant, megabytes: usize, rounds: u32, seed: u64) -> Result<u64> {
    let (key, _, _) = keys_from_seed(seed);
    let cipher = Cast128::new(&key, variant, rounds)?;
    let mut buf = block_buffer(megabytes, seed);
    encrypt_in_place(&cipher, &mut buf);
    Ok(fold_checksum(&buf))
}

/// Single-threaded ECB throughput over `megabytes` MiB of seeded data.
pub fn bench_block_encrypt(variant: Variant, megabytes: usize, rounds: u32, seed: u64) -> Result<BenchReport> {
    let (key, _, _) = keys_from_seed(seed);
    let cipher = Cast128::new(&key, variant, rounds)?;
    let plain = block_buffer(megabytes, seed);

    let mut warm = plain[..plain.len() / 10 / 8 * 8].to_vec();
    encrypt_in_place(&cipher, &mut warm);

    let mut batches = Batches { times: Vec::with_capacity(BATCHES) };
    let mut checksum = 0;
    for _ in 0..BATCHES {
        let mut buf = plain.clone();
        let t0 = Instant::now();
        encrypt_in_place(&cipher, black_box(&mut buf));
        batches.times.push((t0.elapsed().as_nanos() as u64).max(1));
        checksum = fold_checksum(&buf);
    }
    let blocks = (plain.len() / 8) as u64;
    let median = batches.median();
    Ok(BenchReport {
        variant,
        op_kind: OpKind::BlockEncrypt,
        iterations: blocks,
        total_time_ns: batches.times.iter().sum(),
        ns_per_op: median as f64 / blocks as f64,
        throughput_mb_s: Some(plain.len() as f64 / MIB as f64 / (median as f64 * 1e-9)),
        speedup_modified_vs_original: None,
        checksum,
        unstable: batches.unstable(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_bench_reports_time_and_reference_checksum() {
        for v in Variant::ALL {
            let r = bench_round_function(v, 10_000, 7);
            assert!(r.ns_per_op > 0.0);
            assert_eq!(r.iterations, 10_000);
            assert_eq!(r.checksum, u64::from(round_function_chain(v, 10_000, 7)));
            assert_eq!(r.checksum, bench_round_function(v, 10_000, 7).checksum);
        }
    }

    #[test]
    fn comparison_fills_speedup() {
        let [o, m] = compare_round_function(16_000, 1);
        assert_eq!(o.variant, Variant::Original);
        assert_eq!(m.variant, Variant::Modified);
        assert_eq!(o.speedup_modified_vs_original, m.speedup_modified_vs_original);
        assert!(o.speedup_modified_vs_original.unwrap() > 0.0);
        assert_ne!(o.checksum, m.checksum);
    }

    #[test]
    fn block_bench_checksums() {
        let o = bench_block_encrypt(Variant::Original, 1, 16, 3).unwrap();
        let m = bench_block_encrypt(Variant::Modified, 1, 16, 3).unwrap();
        assert!(o.throughput_mb_s.unwrap() > 0.0);
        assert_eq!(o.iterations, (MIB / 8) as u64);
        assert_eq!(o.checksum, block_encrypt_checksum(Variant::Original, 1, 16, 3).unwrap());
        assert_ne!(o.checksum, m.checksum);
        assert!(bench_block_encrypt(Variant::Original, 1, 0, 3).is_err());
    }
}
