//! ECB application of a cipher variant to images and byte strings.
//!
//! Image mode treats the row-major pixel buffer as a sequence of 8-byte
//! blocks and requires the pixel count to be a multiple of 8, so plain and
//! cipher images always have the same size. Byte mode uses PKCS#7 padding.

use rayon::prelude::*;

use crate::cast::{Block64, Cast128, MasterKey, Variant};
use crate::error::{Error, Result};
use crate::image::GrayImage;

pub const BLOCK_BYTES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EcbConfig {
    pub key: MasterKey,
    pub variant: Variant,
    pub rounds: u32,
}

impl EcbConfig {
    pub fn new(key: MasterKey, variant: Variant, rounds: u32) -> Self {
        EcbConfig { key, variant, rounds }
    }

    pub fn cipher(&self) -> Result<Cast128> {
        Cast128::new(&self.key, self.variant, self.rounds)
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Encrypt,
    Decrypt,
}

// Blocks are independent; par_chunks_mut keeps each result in place.
fn apply_in_place(cipher: &Cast128, data: &mut [u8], dir: Direction) {
    debug_assert_eq!(data.len() % BLOCK_BYTES, 0);
    data.par_chunks_mut(BLOCK_BYTES * 1024).for_each(|chunk| {
        for block in chunk.chunks_exact_mut(BLOCK_BYTES) {
            let b = Block64::from_bytes(block.try_into().unwrap());
            let out = match dir {
                Direction::Encrypt => cipher.encrypt(b),
                Direction::Decrypt => cipher.decrypt(b),
            };
            block.copy_from_slice(&out.to_bytes());
        }
    });
}

fn apply_image(img: &GrayImage, cfg: &EcbConfig, dir: Direction) -> Result<GrayImage> {
    if !img.len().is_multiple_of(BLOCK_BYTES) {
        return Err(Error::NotBlockAligned(img.len()));
    }
    let cipher = cfg.cipher()?;
    let mut out = img.clone();
    apply_in_place(&cipher, out.pixels_mut(), dir);
    Ok(out)
}

pub fn encrypt_image_ecb(img: &GrayImage, cfg: &EcbConfig) -> Result<GrayImage> {
    apply_image(img, cfg, Direction::Encrypt)
}

pub fn decrypt_image_ecb(img: &GrayImage, cfg: &EcbConfig) -> Result<GrayImage> {
    apply_image(img, cfg, Direction::Decrypt)
}

/// Pads with PKCS#7 (always at least one byte) and encrypts.
pub fn encrypt_bytes_ecb(data: &[u8], cfg: &EcbConfig) -> Result<Vec<u8>> {
    let cipher = cfg.cipher()?;
    let pad = BLOCK_BYTES - data.len() % BLOCK_BYTES;
    let mut out = Vec::with_capacity(data.len() + pad);
    out.extend_from_slice(data);
    out.resize(data.len() + pad, pad as u8);
    apply_in_place(&cipher, &mut out, Direction::Encrypt);
    Ok(out)
}

pub fn decrypt_bytes_ecb(data: &[u8], cfg: &EcbConfig) -> Result<Vec<u8>> {
    if data.is_empty() || !data.len().is_multiple_of(BLOCK_BYTES) {
        return Err(Error::BadPadding);
    }
    let cipher = cfg.cipher()?;
    let mut out = data.to_vec();
    apply_in_place(&cipher, &mut out, Direction::Decrypt);
    let pad = *out.last().unwrap() as usize;
    if pad == 0 || pad > BLOCK_BYTES || !out[out.len() - pad..].iter().all(|&b| b as usize == pad) {
        return Err(Error::BadPadding);
    }
    out.truncate(out.len() - pad);
    Ok(out)
}
