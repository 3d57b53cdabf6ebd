//! CAST-128 (RFC 2144) and a variant whose round functions regroup the
//! S-box combining step.
//!
//! Both variants share the key schedule, the S-boxes and the keyed mixing
//! step that produces the 32-bit intermediate `I`. They differ only in how
//! the four S-box outputs are combined:
//!
//! | type | rounds               | original              | modified              |
//! |------|----------------------|-----------------------|-----------------------|
//! | 1    | 1, 4, 7, 10, 13, 16  | `((a ^ b) - c) + d`   | `(a ^ b) - (c + d)`   |
//! | 2    | 2, 5, 8, 11, 14      | `((a - b) + c) ^ d`   | `(a - b) + (c ^ d)`   |
//! | 3    | 3, 6, 9, 12, 15      | `((a + b) ^ c) - d`   | `(a + b) ^ (c - d)`   |
//!
//! with `a = S1[Ia]`, `b = S2[Ib]`, `c = S3[Ic]`, `d = S4[Id]`. The wedge
//! operator in published formulas for this cipher is XOR, not AND.
//! The modified form has two independent operations followed by one, so a
//! superscalar core can evaluate it with a dependency chain of depth two
//! instead of three.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[allow(clippy::unreadable_literal)]
mod sbox;
mod schedule;

pub use sbox::{SBoxTables, S1, S2, S3, S4, S5, S6, S7, S8, SBOXES};

/// Number of Feistel rounds in full CAST-128 (for every key length here).
pub const MAX_ROUNDS: u32 = 16;

/// One 64-bit block as its left and right 32-bit halves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Block64 {
    pub left: u32,
    pub right: u32,
}

impl Block64 {
    pub const fn new(left: u32, right: u32) -> Self {
        Block64 { left, right }
    }

    pub const fn from_u64(v: u64) -> Self {
        Block64 { left: (v >> 32) as u32, right: v as u32 }
    }

    pub const fn to_u64(self) -> u64 {
        ((self.left as u64) << 32) | self.right as u64
    }

    /// Big-endian: the most significant byte of `left` comes first.
    pub fn from_bytes(bytes: [u8; 8]) -> Self {
        Self::from_u64(u64::from_be_bytes(bytes))
    }

    pub fn to_bytes(self) -> [u8; 8] {
        self.to_u64().to_be_bytes()
    }
}

impl fmt::Display for Block64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08X}{:08X}", self.left, self.right)
    }
}

impl FromStr for Block64 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::InvalidHex(format!("{s:?}: {e}")))?;
        let arr: [u8; 8] =
            bytes.try_into().map_err(|_| Error::InvalidHex(format!("{s:?}: a block is 16 hex digits")))?;
        Ok(Block64::from_bytes(arr))
    }
}

/// A CAST-128 key of 40 to 128 bits in 8-bit steps.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MasterKey {
    bytes: [u8; 16],
    len: u8,
}

impl MasterKey {
    pub const MIN_LEN: usize = 5;
    pub const MAX_LEN: usize = 16;

    pub fn new(key: &[u8]) -> Result<Self> {
        if !(Self::MIN_LEN..=Self::MAX_LEN).contains(&key.len()) {
            return Err(Error::InvalidKeyLength(key.len()));
        }
        let mut bytes = [0u8; 16];
        bytes[..key.len()].copy_from_slice(key);
        Ok(MasterKey { bytes, len: key.len() as u8 })
    }

    /// Parses 10 to 32 hex digits (an even count).
    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s.trim()).map_err(|e| Error::InvalidHex(format!("{s:?}: {e}")))?;
        Self::new(&bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes[..self.len as usize]
    }

    pub fn bit_len(&self) -> usize {
        self.len as usize * 8
    }

    /// The key zero-padded to 16 octets, as consumed by the schedule.
    pub fn padded(&self) -> [u8; 16] {
        self.bytes
    }

    /// Returns a copy with bit `index` complemented. Bit 0 is the most
    /// significant bit of the first octet.
    pub fn with_bit_flipped(&self, index: usize) -> Result<Self> {
        if index >= self.bit_len() {
            return Err(Error::InvalidBitIndex { index, bits: self.bit_len() });
        }
        let mut out = *self;
        out.bytes[index / 8] ^= 0x80 >> (index % 8);
        Ok(out)
    }

    pub fn to_hex(&self) -> String {
        hex::encode_upper(self.as_bytes())
    }
}

impl fmt::Debug for MasterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MasterKey({})", self.to_hex())
    }
}

impl FromStr for MasterKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_hex(s)
    }
}

/// The 16 masking subkeys and 16 five-bit rotation subkeys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundKeys {
    pub km: [u32; 16],
    pub kr: [u8; 16],
}

impl RoundKeys {
    pub fn new(key: &MasterKey) -> Self {
        key_schedule(key)
    }
}

pub fn key_schedule(key: &MasterKey) -> RoundKeys {
    schedule::key_schedule(key)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    Modified,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Original, Variant::Modified];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::Modified => "modified",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "original" => Ok(Variant::Original),
            "modified" => Ok(Variant::Modified),
            other => Err(format!("unknown variant {other:?} (expected original or modified)")),
        }
    }
}

#[inline]
pub fn rotl32(x: u32, n: u32) -> u32 {
    x.rotate_left(n)
}

/// Round type (1, 2 or 3) of a 1-based round index.
#[inline]
pub fn round_type(round_index: usize) -> usize {
    debug_assert!((1..=16).contains(&round_index));
    (round_index - 1) % 3 + 1
}

#[inline(always)]
fn sbox_bytes(i: u32) -> (u32, u32, u32, u32) {
    (S1[(i >> 24) as usize], S2[((i >> 16) & 0xff) as usize], S3[((i >> 8) & 0xff) as usize], S4[(i & 0xff) as usize])
}

/// The keyed mixing step: `(km op r) <<< kr` with op = +, ^, - by type.
#[inline(always)]
pub fn intermediate(round_type: usize, km: u32, kr: u32, r_prev: u32) -> u32 {
    let mixed = match round_type {
        1 => km.wrapping_add(r_prev),
        2 => km ^ r_prev,
        _ => km.wrapping_sub(r_prev),
    };
    mixed.rotate_left(kr)
}

/// CAST-128 round function F for a 1-based `round_index`.
#[inline(always)]
pub fn round_function(round_index: usize, variant: Variant, km: u32, kr: u32, r_prev: u32) -> u32 {
    let t = round_type(round_index);
    let (a, b, c, d) = sbox_bytes(intermediate(t, km, kr, r_prev));
    match (variant, t) {
        (Variant::Original, 1) => (a ^ b).wrapping_sub(c).wrapping_add(d),
        (Variant::Original, 2) => (a.wrapping_sub(b).wrapping_add(c)) ^ d,
        (Variant::Original, _) => (a.wrapping_add(b) ^ c).wrapping_sub(d),
        (Variant::Modified, 1) => (a ^ b).wrapping_sub(c.wrapping_add(d)),
        (Variant::Modified, 2) => a.wrapping_sub(b).wrapping_add(c ^ d),
        (Variant::Modified, _) => a.wrapping_add(b) ^ c.wrapping_sub(d),
    }
}

fn check_rounds(rounds: u32) -> Result<()> {
    if (1..=MAX_ROUNDS).contains(&rounds) {
        Ok(())
    } else {
        Err(Error::InvalidRounds(rounds))
    }
}

/// Encrypts with the first `rounds` subkeys, then swaps the halves.
pub fn encrypt_block(block: Block64, keys: &RoundKeys, variant: Variant, rounds: u32) -> Result<Block64> {
    check_rounds(rounds)?;
    Ok(encrypt_unchecked(block, keys, variant, rounds as usize))
}

/// Inverse of [`encrypt_block`] for the same `rounds`.
pub fn decrypt_block(block: Block64, keys: &RoundKeys, variant: Variant, rounds: u32) -> Result<Block64> {
    check_rounds(rounds)?;
    Ok(decrypt_unchecked(block, keys, variant, rounds as usize))
}

#[inline]
fn encrypt_unchecked(block: Block64, keys: &RoundKeys, variant: Variant, rounds: usize) -> Block64 {
    let (mut l, mut r) = (block.left, block.right);
    for i in 0..rounds {
        let f = round_function(i + 1, variant, keys.km[i], u32::from(keys.kr[i]), r);
        (l, r) = (r, l ^ f);
    }
    Block64::new(r, l)
}

#[inline]
fn decrypt_unchecked(block: Block64, keys: &RoundKeys, variant: Variant, rounds: usize) -> Block64 {
    let (mut l, mut r) = (block.left, block.right);
    for i in (0..rounds).rev() {
        let f = round_function(i + 1, variant, keys.km[i], u32::from(keys.kr[i]), r);
        (l, r) = (r, l ^ f);
    }
    Block64::new(r, l)
}

/// A scheduled key bound to a variant and round count.
#[derive(Clone, Debug)]
pub struct Cast128 {
    keys: RoundKeys,
    variant: Variant,
    rounds: u32,
}

impl Cast128 {
    pub fn new(key: &MasterKey, variant: Variant, rounds: u32) -> Result<Self> {
        check_rounds(rounds)?;
        Ok(Cast128 { keys: key_schedule(key), variant, rounds })
    }

    pub fn keys(&self) -> &RoundKeys {
        &self.keys
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    #[inline]
    pub fn encrypt(&self, block: Block64) -> Block64 {
        encrypt_unchecked(block, &self.keys, self.variant, self.rounds as usize)
    }

    #[inline]
    pub fn decrypt(&self, block: Block64) -> Block64 {
        decrypt_unchecked(block, &self.keys, self.variant, self.rounds as usize)
    }
}
