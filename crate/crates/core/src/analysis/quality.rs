//! Encryption quality: mean absolute deviation between the grey-level
//! histograms of a plain image and its cipher image.

use serde::Serialize;

use crate::cast::{MasterKey, Variant};
use crate::error::Result;
use crate::image::{histogram, GrayImage, LEVELS};
use crate::modes::{encrypt_image_ecb, EcbConfig};

/// `sum_L |H_L(cipher) - H_L(plain)| / 256`.
pub fn encryption_quality(plain: &GrayImage, cipher: &GrayImage) -> Result<f64> {
    plain.check_same_dimensions(cipher)?;
    let (hp, hc) = (histogram(plain), histogram(cipher));
    let total: u64 = hp.bins.iter().zip(&hc.bins).map(|(a, b)| a.abs_diff(*b)).sum();
    Ok(total as f64 / LEVELS as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EqPoint {
    pub variant: Variant,
    pub rounds: u32,
    pub eq: f64,
}

/// Encryption quality of `img` after encryption with each round count.
pub fn eq_vs_rounds(img: &GrayImage, key: &MasterKey, variant: Variant, rounds_list: &[u32]) -> Result<Vec<EqPoint>> {
    rounds_list
        .iter()
        .map(|&rounds| {
            let cipher = encrypt_image_ecb(img, &EcbConfig::new(*key, variant, rounds))?;
            Ok(EqPoint { variant, rounds, eq: encryption_quality(img, &cipher)? })
        })
        .collect()
}
