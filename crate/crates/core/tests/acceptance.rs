//! Acceptance criteria, one line of output per criterion.
//!
//! Runs as a plain binary (`harness = false`) so every criterion is
//! evaluated and reported even when an earlier one fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use castlab::analysis::{
    avalanche_experiment, correlation_coefficient, eq_vs_rounds, histogram_uniformity, key_sensitivity,
    sample_adjacent_pairs, Adjacency, AvalancheConfig, Comparator, DiffMode, FlipMode, DEFAULT_KEY1, DEFAULT_KEY2,
};
use castlab::bench::{compare_round_function, round_function_chain, REFERENCE_IMPROVEMENT};
use castlab::cast::{decrypt_block, encrypt_block, intermediate, key_schedule, round_function, S4};
use castlab::image::{histogram, synth_image, SynthKind, LEVELS};
use castlab::modes::{encrypt_image_ecb, EcbConfig};
use castlab::report::to_json;
use castlab::rng::RngState;
use castlab::{Block64, MasterKey, Variant};

type Outcome = Result<String, String>;

fn k1() -> MasterKey {
    MasterKey::from_hex(DEFAULT_KEY1).unwrap()
}

fn k2() -> MasterKey {
    MasterKey::from_hex(DEFAULT_KEY2).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_time(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    check(took < limit, format!("{detail}; {:.2?} (limit {:?})", took, limit))
}

fn rfc_known_answer() -> Outcome {
    let start = Instant::now();
    let pt: Block64 = "0123456789ABCDEF".parse().unwrap();
    // keys of 80 bits or less are specified by the RFC at 12 rounds
    let vectors = [
        ("0123456712345678234567893456789A", 16, "238B4FE5847E44B2"),
        ("01234567123456782345", 12, "EB6A711A2C02271B"),
        ("0123456712", 12, "7AC816D16E9B302E"),
    ];
    let mut bad = Vec::new();
    for (k, rounds, expect) in vectors {
        let keys = key_schedule(&MasterKey::from_hex(k).unwrap());
        let got = encrypt_block(pt, &keys, Variant::Original, rounds).unwrap();
        if got.to_string() != expect {
            bad.push(format!("{k}: got {got}, want {expect}"));
        }
    }
    if !bad.is_empty() {
        return Err(bad.join("; "));
    }
    within_time(Duration::from_secs(1), start, "128/80/40-bit vectors exact".into())
}

fn roundtrip() -> Outcome {
    let start = Instant::now();
    let mut rng = RngState::new(0xACCE);
    let mut failures = 0u64;
    let mut checked = 0u64;
    for _ in 0..10_000 {
        let len = 5 + rng.rand_below(12).unwrap() as usize;
        let bytes: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
        let keys = key_schedule(&MasterKey::new(&bytes).unwrap());
        let block = Block64::from_u64(rng.next_u64());
        for variant in Variant::ALL {
            for rounds in 1..=16 {
                let c = encrypt_block(block, &keys, variant, rounds).unwrap();
                if decrypt_block(c, &keys, variant, rounds).unwrap() != block {
                    failures += 1;
                }
                checked += 1;
            }
        }
    }
    if failures > 0 {
        return Err(format!("{failures} of {checked} roundtrips failed"));
    }
    within_time(Duration::from_secs(30), start, format!("{checked} roundtrips, 0 failures"))
}

fn type1_identity() -> Outcome {
    let mut rng = RngState::new(0x7E1);
    let mut failures = 0;
    for _ in 0..100_000 {
        let (km, r) = (rng.next_u64() as u32, rng.next_u64() as u32);
        let kr = rng.rand_below(32).unwrap() as u32;
        let round = [1, 4, 7, 10, 13, 16][rng.rand_below(6).unwrap() as usize];
        let d = S4[(intermediate(1, km, kr, r) & 0xff) as usize];
        let orig = round_function(round, Variant::Original, km, kr, r);
        let modi = round_function(round, Variant::Modified, km, kr, r);
        if modi != orig.wrapping_sub(d.wrapping_mul(2)) {
            failures += 1;
        }
    }
    check(failures == 0, format!("100000 type-1 inputs, {failures} failures"))
}

fn avalanche_moments() -> Outcome {
    let cfg = AvalancheConfig::new(FlipMode::Plaintext, 10_000, 16, k1(), 1);
    let t = avalanche_experiment(&cfg).map_err(|e| e.to_string())?;
    let stats = [
        ("original", t.mean_distance_original, t.sd_distance_original),
        ("modified", t.mean_distance_modified, t.sd_distance_modified),
    ];
    let ok = stats.iter().all(|&(_, m, s)| (31.5..=32.5).contains(&m) && (3.5..=4.5).contains(&s));
    let detail = stats.iter().map(|(n, m, s)| format!("{n} mean {m:.3} sd {s:.3}")).collect::<Vec<_>>().join(", ");
    check(ok, format!("{detail} (bands [31.5,32.5], [3.5,4.5])"))
}

fn avalanche_table_shape() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for mode in [FlipMode::Plaintext, FlipMode::Key] {
        let mut cfg = AvalancheConfig::new(mode, 10_000, 16, k1(), 2);
        cfg.comparator = Comparator::CloserTo32;
        let t = avalanche_experiment(&cfg).map_err(|e| e.to_string())?;
        let (wo, wm, ties) = (t.win_fraction_original(), t.win_fraction_modified(), t.tie_fraction());
        ok &= (0.40..=0.47).contains(&wo) && (0.40..=0.47).contains(&wm) && (0.115..=0.15).contains(&ties);
        ok &= t.wins_original + t.wins_modified + t.ties == t.samples;
        parts.push(format!("{mode}: {wo:.4}/{wm:.4}/{ties:.4}"));
    }
    check(ok, format!("{} (wins [0.40,0.47], ties [0.115,0.15])", parts.join(", ")))
}

fn key_sensitivity_band() -> Outcome {
    let start = Instant::now();
    let img = synth_image(SynthKind::SmoothNoise, 512, 512, 11);
    let mut parts = Vec::new();
    let mut ok = true;
    for variant in Variant::ALL {
        let r = key_sensitivity(&img, &k1(), &k2(), variant, 16, DiffMode::Absolute).map_err(|e| e.to_string())?;
        ok &= (99.55..=99.67).contains(&r.percent_differing);
        parts.push(format!("{variant} {:.6}%", r.percent_differing));
    }
    if !ok {
        return Err(format!("{} outside [99.55, 99.67]", parts.join(", ")));
    }
    within_time(Duration::from_secs(5), start, parts.join(", "))
}

fn histogram_uniform() -> Outcome {
    let mut worst = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut failures = Vec::new();
    for seed in 0..5 {
        let img = synth_image(SynthKind::SmoothNoise, 512, 512, 100 + seed);
        for variant in Variant::ALL {
            let c = encrypt_image_ecb(&img, &EcbConfig::new(k1(), variant, 16)).map_err(|e| e.to_string())?;
            let u = histogram_uniformity(&histogram(&c)).map_err(|e| e.to_string())?;
            worst = (
                worst.0.min(u.min_bin_percent),
                worst.1.max(u.max_bin_percent),
                worst.2.min(u.p_value),
                worst.3.max(u.p_value),
            );
            let bins_ok = u.min_bin_percent >= 0.33 && u.max_bin_percent <= 0.46;
            let p_ok = u.p_value > 0.0001 && u.p_value < 0.9999;
            if !(bins_ok && p_ok) {
                failures.push(format!(
                    "seed {seed} {variant}: bins [{:.4}, {:.4}]%, p {:.5}",
                    u.min_bin_percent, u.max_bin_percent, u.p_value
                ));
            }
        }
    }
    let detail = format!(
        "10 cipherimages: bins in [{:.4}, {:.4}]%, p in [{:.4}, {:.4}] of {} levels",
        worst.0, worst.1, worst.2, worst.3, LEVELS
    );
    check(failures.is_empty(), if failures.is_empty() { detail } else { failures.join("; ") })
}

fn correlation_bands() -> Outcome {
    let img = synth_image(SynthKind::SmoothNoise, 512, 512, 21);
    let ciphers: Vec<_> =
        Variant::ALL.iter().map(|&v| encrypt_image_ecb(&img, &EcbConfig::new(k1(), v, 16)).unwrap()).collect();
    let mut plain_min = f64::INFINITY;
    let mut cipher_max = [0.0f64; 2];
    let mut exceed = [0usize; 2];
    for seed in 0..20 {
        let r = |im| {
            correlation_coefficient(&sample_adjacent_pairs(im, 1200, seed, Adjacency::Horizontal).unwrap()).unwrap()
        };
        plain_min = plain_min.min(r(&img));
        for (j, c) in ciphers.iter().enumerate() {
            let rc = r(c).abs();
            cipher_max[j] = cipher_max[j].max(rc);
            if rc >= 0.10 {
                exceed[j] += 1;
            }
        }
    }
    check(
        plain_min > 0.8 && exceed.iter().all(|&e| e <= 1),
        format!(
            "plain r min {plain_min:.4} (> 0.8); cipher |r| max original {:.4}, modified {:.4}; exceedances {:?} (<= 1 of 20)",
            cipher_max[0], cipher_max[1], exceed
        ),
    )
}

fn eq_stability() -> Outcome {
    let img = synth_image(SynthKind::SmoothNoise, 512, 512, 31);
    let rounds: Vec<u32> = (2..=16).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for variant in Variant::ALL {
        let pts = eq_vs_rounds(&img, &k1(), variant, &rounds).map_err(|e| e.to_string())?;
        let lo = pts.iter().map(|p| p.eq).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p.eq).fold(f64::NEG_INFINITY, f64::max);
        ok &= lo > 0.0 && hi / lo <= 1.05;
        parts.push(format!("{variant} EQ [{lo:.3}, {hi:.3}] ratio {:.4}", hi / lo));
    }
    check(ok, format!("{} (ratio <= 1.05)", parts.join(", ")))
}

fn benchmark() -> Outcome {
    let iterations = 4_000_000;
    let [o, m] = compare_round_function(iterations, 5);
    let sums_ok = Variant::ALL
        .iter()
        .zip([&o, &m])
        .all(|(&v, r)| r.checksum == u64::from(round_function_chain(v, iterations, 5)));
    let speedup = o.speedup_modified_vs_original.unwrap_or(0.0);
    check(
        sums_ok && speedup >= 0.95,
        format!(
            "original {:.3} ns/op, modified {:.3} ns/op, speedup {speedup:.3} (>= 0.95; reference {:.2}), checksums {}",
            o.ns_per_op,
            m.ns_per_op,
            1.0 + REFERENCE_IMPROVEMENT,
            if sums_ok { "match" } else { "MISMATCH" }
        ),
    )
}

fn determinism() -> Outcome {
    let run = |workers| {
        let mut tables = Vec::new();
        for mode in [FlipMode::Plaintext, FlipMode::Key] {
            let mut cfg = AvalancheConfig::new(mode, 3000, 16, k1(), 77);
            cfg.workers = Some(workers);
            tables.push(avalanche_experiment(&cfg).unwrap());
        }
        to_json(&tables)
    };
    let one = run(1);
    let eight = run(8);
    let again = run(1);
    let img = synth_image(SynthKind::SmoothNoise, 64, 64, 3);
    let other = |seed| {
        let c = encrypt_image_ecb(&img, &EcbConfig::new(k1(), Variant::Modified, 16)).unwrap();
        let r =
            correlation_coefficient(&sample_adjacent_pairs(&c, 1200, seed, Adjacency::Horizontal).unwrap()).unwrap();
        let ks = key_sensitivity(&img, &k1(), &k2(), Variant::Original, 16, DiffMode::Absolute).unwrap();
        to_json(&(r, ks.summary(&k1(), &k2()), eq_vs_rounds(&img, &k1(), Variant::Original, &[2, 16]).unwrap()))
    };
    check(
        one == eight && one == again && other(9) == other(9),
        format!("avalanche JSON ({} bytes) identical for 1 and 8 workers and on rerun", one.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("RFC known-answer", rfc_known_answer),
        ("roundtrip property", roundtrip),
        ("type-1 algebraic identity", type1_identity),
        ("avalanche moments", avalanche_moments),
        ("avalanche tables shape", avalanche_table_shape),
        ("key sensitivity", key_sensitivity_band),
        ("histogram uniformity", histogram_uniform),
        ("correlation bands", correlation_bands),
        ("EQ stability", eq_stability),
        ("benchmark report", benchmark),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
