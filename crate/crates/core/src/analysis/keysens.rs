//! Key sensitivity: how much of a cipher image changes when the key
//! changes, and what a wrong-key decryption recovers.

use std::str::FromStr;

use serde::Serialize;

use crate::cast::{MasterKey, Variant};
use crate::error::Result;
use crate::image::GrayImage;
use crate::modes::{decrypt_image_ecb, encrypt_image_ecb, EcbConfig};

/// Default key pair: 128-bit keys one bit apart (bit 17).
pub const DEFAULT_KEY1: &str = "ADF278565E262AD1F5DEC94A0BF25B27";
pub const DEFAULT_KEY2: &str = "ADF238565E262AD1F5DEC94A0BF25B27";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DiffMode {
    /// `|a - b|` per pixel.
    #[default]
    Absolute,
    /// `a ^ b` per pixel.
    Xor,
}

impl FromStr for DiffMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "abs" | "absolute" => Ok(DiffMode::Absolute),
            "xor" => Ok(DiffMode::Xor),
            other => Err(format!("unknown difference mode {other:?} (expected abs or xor)")),
        }
    }
}

pub fn difference_image(a: &GrayImage, b: &GrayImage) -> Result<GrayImage> {
    difference_image_with(a, b, DiffMode::Absolute)
}

pub fn difference_image_with(a: &GrayImage, b: &GrayImage, mode: DiffMode) -> Result<GrayImage> {
    a.check_same_dimensions(b)?;
    let pixels = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&p, &q)| match mode {
            DiffMode::Absolute => p.abs_diff(q),
            DiffMode::Xor => p ^ q,
        })
        .collect();
    GrayImage::new(a.width(), a.height(), pixels)
}

/// Percentage of positions where the two images differ.
pub fn percent_differing(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    a.check_same_dimensions(b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let n = a.pixels().iter().zip(b.pixels()).filter(|(p, q)| p != q).count();
    Ok(100.0 * n as f64 / a.len() as f64)
}

#[derive(Clone, Debug)]
pub struct KeySensitivityReport {
    pub variant: Variant,
    pub rounds: u32,
    pub percent_differing: f64,
    pub wrong_key_decrypt_percent: f64,
    pub difference_image: GrayImage,
    /// Plain image encrypted under the first and second key.
    pub cipher_k1: GrayImage,
    pub cipher_k2: GrayImage,
    /// The k1 cipher image decrypted with k2, and the k2 one with k1.
    pub wrong_decrypt_k1_with_k2: GrayImage,
    pub wrong_decrypt_k2_with_k1: GrayImage,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KeySensitivitySummary {
    pub variant: Variant,
    pub rounds: u32,
    pub key1: String,
    pub key2: String,
    pub percent_differing: f64,
    pub wrong_key_decrypt_percent: f64,
}

impl KeySensitivityReport {
    pub fn summary(&self, k1: &MasterKey, k2: &MasterKey) -> KeySensitivitySummary {
        KeySensitivitySummary {
            variant: self.variant,
            rounds: self.rounds,
            key1: k1.to_hex(),
            key2: k2.to_hex(),
            percent_differing: self.percent_differing,
            wrong_key_decrypt_percent: self.wrong_key_decrypt_percent,
        }
    }
}

pub fn key_sensitivity(
    img: &GrayImage,
    k1: &MasterKey,
    k2: &MasterKey,
    variant: Variant,
    rounds: u32,
    diff: DiffMode,
) -> Result<KeySensitivityReport> {
    let c1 = EcbConfig::new(*k1, variant, rounds);
    let c2 = EcbConfig::new(*k2, variant, rounds);
    let cipher_k1 = encrypt_image_ecb(img, &c1)?;
    let cipher_k2 = encrypt_image_ecb(img, &c2)?;
    let wrong_1 = decrypt_image_ecb(&cipher_k1, &c2)?;
    let wrong_2 = decrypt_image_ecb(&cipher_k2, &c1)?;
    Ok(KeySensitivityReport {
        variant,
        rounds,
        percent_differing: percent_differing(&cipher_k1, &cipher_k2)?,
        wrong_key_decrypt_percent: percent_differing(img, &wrong_1)?,
        difference_image: difference_image_with(&cipher_k1, &cipher_k2, diff)?,
        cipher_k1,
        cipher_k2,
        wrong_decrypt_k1_with_k2: wrong_1,
        wrong_decrypt_k2_with_k1: wrong_2,
    })
}
