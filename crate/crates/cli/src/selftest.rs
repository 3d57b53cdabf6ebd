//! Known-answer vectors and a quick pass over the core invariants.

use castlab::analysis::{avalanche_experiment, AvalancheConfig, FlipMode, DEFAULT_KEY1};
use castlab::cast::{intermediate, key_schedule, round_function, S4};
use castlab::image::{decode_image, encode_bmp, encode_pgm, synth_image, SynthKind};
use castlab::modes::{decrypt_bytes_ecb, decrypt_image_ecb, encrypt_bytes_ecb, encrypt_image_ecb, EcbConfig};
use castlab::report::to_json;
use castlab::rng::RngState;
use castlab::{Block64, Cast128, MasterKey, Variant};

type Check = (&'static str, fn() -> bool);

fn rfc_vectors() -> bool {
    let pt: Block64 = "0123456789ABCDEF".parse().unwrap();
    [
        ("0123456712345678234567893456789A", 16, "238B4FE5847E44B2"),
        ("01234567123456782345", 12, "EB6A711A2C02271B"),
        ("0123456712", 12, "7AC816D16E9B302E"),
    ]
    .iter()
    .all(|&(k, rounds, ct)| {
        let c = Cast128::new(&MasterKey::from_hex(k).unwrap(), Variant::Original, rounds).unwrap();
        c.encrypt(pt).to_string() == ct && c.decrypt(c.encrypt(pt)) == pt
    })
}

fn block_roundtrip() -> bool {
    let mut rng = RngState::new(1);
    (0..500).all(|_| {
        let bytes: Vec<u8> = (0..16).map(|_| rng.next_u64() as u8).collect();
        let key = MasterKey::new(&bytes).unwrap();
        let b = Block64::from_u64(rng.next_u64());
        Variant::ALL.iter().all(|&v| {
            (1..=16).all(|r| {
                let c = Cast128::new(&key, v, r).unwrap();
                c.decrypt(c.encrypt(b)) == b
            })
        })
    })
}

fn type1_identity() -> bool {
    let mut rng = RngState::new(2);
    (0..10_000).all(|_| {
        let (km, r) = (rng.next_u64() as u32, rng.next_u64() as u32);
        let kr = rng.rand_below(32).unwrap() as u32;
        let d = S4[(intermediate(1, km, kr, r) & 0xff) as usize];
        round_function(1, Variant::Modified, km, kr, r)
            == round_function(1, Variant::Original, km, kr, r).wrapping_sub(d.wrapping_mul(2))
    })
}

fn rotation_subkeys() -> bool {
    let mut rng = RngState::new(3);
    (0..200).all(|_| {
        let bytes: Vec<u8> = (0..16).map(|_| rng.next_u64() as u8).collect();
        key_schedule(&MasterKey::new(&bytes).unwrap()).kr.iter().all(|&r| r < 32)
    })
}

fn variants_diverge() -> bool {
    let key = MasterKey::from_hex(DEFAULT_KEY1).unwrap();
    let o = Cast128::new(&key, Variant::Original, 16).unwrap();
    let m = Cast128::new(&key, Variant::Modified, 16).unwrap();
    let mut rng = RngState::new(4);
    (0..1000).all(|_| {
        let b = Block64::from_u64(rng.next_u64());
        o.encrypt(b) != m.encrypt(b)
    })
}

fn image_and_bytes_roundtrip() -> bool {
    let img = synth_image(SynthKind::SmoothNoise, 64, 32, 5);
    let cfg = EcbConfig::new(MasterKey::from_hex(DEFAULT_KEY1).unwrap(), Variant::Modified, 16);
    let enc = encrypt_image_ecb(&img, &cfg).unwrap();
    let data: Vec<u8> = (0..37).collect();
    decrypt_image_ecb(&enc, &cfg).unwrap() == img
        && decode_image(&encode_pgm(&img)).unwrap() == img
        && decode_image(&encode_bmp(&img)).unwrap() == img
        && decrypt_bytes_ecb(&encrypt_bytes_ecb(&data, &cfg).unwrap(), &cfg).unwrap() == data
}

fn avalanche_determinism() -> bool {
    let mut cfg = AvalancheConfig::new(FlipMode::Key, 2000, 16, MasterKey::from_hex(DEFAULT_KEY1).unwrap(), 6);
    cfg.workers = Some(1);
    let a = avalanche_experiment(&cfg).unwrap();
    cfg.workers = Some(4);
    let b = avalanche_experiment(&cfg).unwrap();
    a.wins_original + a.wins_modified + a.ties == a.samples && to_json(&a) == to_json(&b)
}

pub const CHECKS: [Check; 7] = [
    ("RFC 2144 known-answer vectors", rfc_vectors),
    ("decrypt(encrypt(x)) = x, both variants, rounds 1..16", block_roundtrip),
    ("type-1 modified F = original F - 2*S4[Id]", type1_identity),
    ("rotation subkeys in 0..31", rotation_subkeys),
    ("original and modified ciphertexts differ", variants_diverge),
    ("image, file and byte-mode roundtrips", image_and_bytes_roundtrip),
    ("avalanche tallies conserved and worker-count invariant", avalanche_determinism),
];

/// Runs every check, printing one line each; true iff all pass.
pub fn run() -> bool {
    let mut all = true;
    for (name, check) in CHECKS {
        let ok = check();
        all &= ok;
        println!("[{}] {name}", if ok { "PASS" } else { "FAIL" });
    }
    all
}
