use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const K1: &str = "ADF278565E262AD1F5DEC94A0BF25B27";

fn castlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_castlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("CASTLAB_SEED")
        .output()
        .expect("spawn castlab")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = castlab(args, dir);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str], dir: &Path) -> Value {
    serde_json::from_str(&ok(args, dir)).unwrap()
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(&["synth", "--width", "64", "--height", "64", "--seed", "3", "--out", "plain.pgm"], dir.path());
    dir
}

#[test]
fn encrypt_decrypt_roundtrip_across_formats() {
    let dir = workspace();
    let d = dir.path();
    ok(&["encrypt", "--key", K1, "--variant", "modified", "--in", "plain.pgm", "--out", "c.bmp"], d);
    ok(&["decrypt", "--key", K1, "--variant", "modified", "--in", "c.bmp", "--out", "back.pgm"], d);
    assert_eq!(std::fs::read(d.join("plain.pgm")).unwrap(), std::fs::read(d.join("back.pgm")).unwrap());
    assert_ne!(std::fs::read(d.join("c.bmp")).unwrap()[..2], *b"P5");
}

#[test]
fn byte_mode_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("msg.txt"), b"seventeen bytes!!").unwrap();
    ok(&["encrypt", "--key", "0123456712", "--in", "msg.txt", "--out", "msg.enc"], d);
    assert_eq!(std::fs::read(d.join("msg.enc")).unwrap().len(), 24);
    ok(&["decrypt", "--key", "0123456712", "--in", "msg.enc", "--out", "msg.out"], d);
    assert_eq!(std::fs::read(d.join("msg.out")).unwrap(), b"seventeen bytes!!");
}

#[test]
fn bad_key_is_a_usage_error() {
    let dir = workspace();
    let out = castlab(&["encrypt", "--key", "ZZZ", "--in", "plain.pgm", "--out", "x.pgm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("InvalidHex"));
    let out = castlab(&["encrypt", "--key", "0123", "--in", "plain.pgm", "--out", "x.pgm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("InvalidKeyLength"));
}

#[test]
fn missing_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = castlab(&["encrypt", "--key", K1, "--in", "absent.pgm", "--out", "x.pgm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = castlab(&["histogram", "--in", "absent.pgm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unaligned_image_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--width", "3", "--height", "3", "--out", "odd.pgm"], d);
    let out = castlab(&["encrypt", "--key", K1, "--in", "odd.pgm", "--out", "x.pgm"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotBlockAligned"));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&["selftest"], dir.path());
    assert!(stdout.lines().count() >= 7);
    assert!(!stdout.contains("[FAIL]"));
}

#[test]
fn avalanche_json_schema_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["avalanche", "--samples", "3000", "--rounds", "4,16", "--seed", "11"];
    let first = ok(&args, d);
    assert_eq!(first, ok(&args, d));
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["mode"], "plaintext");
    assert_eq!(v["comparator"], "closer32");
    let tables = v["tables"].as_array().unwrap();
    assert_eq!(tables.len(), 2);
    let mut keys: Vec<&str> = tables[0].as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "mean_distance_modified",
            "mean_distance_original",
            "rounds",
            "samples",
            "sd_distance_modified",
            "sd_distance_original",
            "ties",
            "wins_modified",
            "wins_original",
        ]
    );
    for t in tables {
        let sum =
            t["wins_original"].as_u64().unwrap() + t["wins_modified"].as_u64().unwrap() + t["ties"].as_u64().unwrap();
        assert_eq!(sum, 3000);
    }
    let other = ok(&["avalanche", "--samples", "3000", "--rounds", "4,16", "--seed", "12"], d);
    assert_ne!(first, other);
}

#[test]
fn seed_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let flag = ok(&["avalanche", "--mode", "key", "--samples", "500", "--rounds", "8", "--seed", "9"], d);
    let out = Command::new(env!("CARGO_BIN_EXE_castlab"))
        .args(["avalanche", "--mode", "key", "--samples", "500", "--rounds", "8"])
        .current_dir(d)
        .env("CASTLAB_SEED", "9")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), flag);
}

#[test]
fn avalanche_csv_has_one_row_per_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = ok(&["avalanche", "--samples", "200", "--rounds", "2..6:2", "--format", "csv"], dir.path());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("rounds,samples,wins_original,wins_modified,ties"));
}

#[test]
fn invalid_rounds_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = castlab(&["avalanche", "--rounds", "0..20"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn histogram_writes_csv_and_svg() {
    let dir = workspace();
    let d = dir.path();
    ok(&["encrypt", "--key", K1, "--in", "plain.pgm", "--out", "c.pgm"], d);
    let v = json(&["histogram", "--in", "c.pgm", "--csv", "h.csv", "--svg", "h.svg"], d);
    assert_eq!(v["total"], 4096);
    assert!(v["chi_square"].as_f64().unwrap() >= 0.0);
    let p = v["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    let csv = std::fs::read_to_string(d.join("h.csv")).unwrap();
    assert_eq!(csv.lines().count(), 257);
    assert_eq!(csv.lines().next().unwrap(), "level,count,percent");
    let svg = std::fs::read_to_string(d.join("h.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<rect x=").count(), 256);
}

#[test]
fn correlate_reports_coefficient_and_scatter() {
    let dir = workspace();
    let d = dir.path();
    let v = json(&["correlate", "--in", "plain.pgm", "--seed", "2", "--svg", "s.svg"], d);
    assert_eq!(v["pairs"], 1200);
    assert_eq!(v["direction"], "horizontal");
    assert!(v["correlation"].as_f64().unwrap() > 0.5);
    assert_eq!(std::fs::read_to_string(d.join("s.svg")).unwrap().matches("<circle").count(), 1200);
    ok(&["encrypt", "--key", K1, "--in", "plain.pgm", "--out", "c.pgm"], d);
    let v = json(&["correlate", "--in", "c.pgm", "--direction", "vertical"], d);
    assert!(v["correlation"].as_f64().unwrap().abs() < 0.2);
}

#[test]
fn quality_single_pair_and_sweep() {
    let dir = workspace();
    let d = dir.path();
    ok(&["encrypt", "--key", K1, "--in", "plain.pgm", "--out", "c.pgm"], d);
    let v = json(&["quality", "--plain", "plain.pgm", "--cipher", "c.pgm"], d);
    assert!(v["eq"].as_f64().unwrap() > 0.0);
    let same = json(&["quality", "--plain", "plain.pgm", "--cipher", "plain.pgm"], d);
    assert_eq!(same["eq"].as_f64().unwrap(), 0.0);
    let rows = json(&["quality", "--sweep", "--in", "plain.pgm", "--rounds", "2,16"], d);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1]["rounds"], 16);
    assert_eq!(rows[1]["variant"], "original");
    assert_eq!(rows[1]["eq"], v["eq"]);
    assert_eq!(rows[3]["variant"], "modified");
}

#[test]
fn keysens_reports_and_saves_images() {
    let dir = workspace();
    let d = dir.path();
    let v = json(&["keysens", "--in", "plain.pgm", "--out-dir", "ks"], d);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r["percent_differing"].as_f64().unwrap() > 95.0);
        assert!(r["wrong_key_decrypt_percent"].as_f64().unwrap() > 95.0);
        assert_eq!(r["key2"], "ADF238565E262AD1F5DEC94A0BF25B27");
    }
    assert_eq!(std::fs::read_dir(d.join("ks")).unwrap().count(), 10);
    assert!(d.join("ks/modified_difference.pgm").exists());
}

#[test]
fn plot_and_bench_run() {
    let dir = workspace();
    let d = dir.path();
    ok(&["plot", "--kind", "histogram", "--in", "plain.pgm", "--out", "h.svg"], d);
    ok(&["plot", "--kind", "scatter", "--in", "plain.pgm", "--out", "s.svg", "--pairs", "50"], d);
    assert!(d.join("h.svg").exists() && d.join("s.svg").exists());
    let v = json(&["bench", "--iters", "20000", "--mb", "1", "--kind", "all"], d);
    assert_eq!(v["round_function"].as_array().unwrap().len(), 2);
    assert_eq!(v["block_encrypt"].as_array().unwrap().len(), 2);
    assert!(v["round_function"][0]["speedup_modified_vs_original"].as_f64().unwrap() > 0.0);
    assert!(v["block_encrypt"][0]["throughput_mb_s"].as_f64().unwrap() > 0.0);
}
