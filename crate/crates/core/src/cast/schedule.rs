//! Key schedule of RFC 2144, section 2.4.
//!
//! The 128-bit key (short keys zero-padded) is held as four big-endian
//! words. Two intermediate arrays `x` and `z` are alternately refreshed and
//! each refresh yields four subkeys; one pass of four refreshes gives 16
//! subkeys, and the whole pass runs twice to produce all 32.

use super::sbox::{S5, S6, S7, S8};
use super::{MasterKey, RoundKeys};

type Words = [u32; 4];

/// Byte `i` (0 = most significant byte of word 0) of a four-word array.
#[inline]
fn b(w: &Words, i: usize) -> usize {
    ((w[i / 4] >> (8 * (3 - i % 4))) & 0xff) as usize
}

fn z_from_x(x: &Words) -> Words {
    let mut z = [0u32; 4];
    z[0] = x[0] ^ S5[b(x, 13)] ^ S6[b(x, 15)] ^ S7[b(x, 12)] ^ S8[b(x, 14)] ^ S7[b(x, 8)];
    z[1] = x[2] ^ S5[b(&z, 0)] ^ S6[b(&z, 2)] ^ S7[b(&z, 1)] ^ S8[b(&z, 3)] ^ S8[b(x, 10)];
    z[2] = x[3] ^ S5[b(&z, 7)] ^ S6[b(&z, 6)] ^ S7[b(&z, 5)] ^ S8[b(&z, 4)] ^ S5[b(x, 9)];
    z[3] = x[1] ^ S5[b(&z, 10)] ^ S6[b(&z, 9)] ^ S7[b(&z, 11)] ^ S8[b(&z, 8)] ^ S6[b(x, 11)];
    z
}

fn x_from_z(z: &Words) -> Words {
    let mut x = [0u32; 4];
    x[0] = z[2] ^ S5[b(z, 5)] ^ S6[b(z, 7)] ^ S7[b(z, 4)] ^ S8[b(z, 6)] ^ S7[b(z, 0)];
    x[1] = z[0] ^ S5[b(&x, 0)] ^ S6[b(&x, 2)] ^ S7[b(&x, 1)] ^ S8[b(&x, 3)] ^ S8[b(z, 2)];
    x[2] = z[1] ^ S5[b(&x, 7)] ^ S6[b(&x, 6)] ^ S7[b(&x, 5)] ^ S8[b(&x, 4)] ^ S5[b(z, 1)];
    x[3] = z[3] ^ S5[b(&x, 10)] ^ S6[b(&x, 9)] ^ S7[b(&x, 11)] ^ S8[b(&x, 8)] ^ S6[b(z, 3)];
    x
}

/// Byte indices for each subkey of one pass: four groups (one per array
/// refresh) of four subkeys. Each row is `[a, b, c, d, e]` giving
/// `S5[a] ^ S6[b] ^ S7[c] ^ S8[d] ^ Sj[e]`, where the last box cycles
/// S5, S6, S7, S8 down the group.
const EXTRACT: [[[usize; 5]; 4]; 4] = [
    [[8, 9, 7, 6, 2], [10, 11, 5, 4, 6], [12, 13, 3, 2, 9], [14, 15, 1, 0, 12]],
    [[3, 2, 12, 13, 8], [1, 0, 14, 15, 13], [7, 6, 8, 9, 3], [5, 4, 10, 11, 7]],
    [[3, 2, 12, 13, 9], [1, 0, 14, 15, 12], [7, 6, 8, 9, 2], [5, 4, 10, 11, 6]],
    [[8, 9, 7, 6, 3], [10, 11, 5, 4, 7], [12, 13, 3, 2, 8], [14, 15, 1, 0, 13]],
];

const LAST_BOX: [&[u32; 256]; 4] = [&S5, &S6, &S7, &S8];

fn extract(w: &Words, group: usize, out: &mut [u32]) {
    for (j, idx) in EXTRACT[group].iter().enumerate() {
        out[j] = S5[b(w, idx[0])] ^ S6[b(w, idx[1])] ^ S7[b(w, idx[2])] ^ S8[b(w, idx[3])] ^ LAST_BOX[j][b(w, idx[4])];
    }
}

/// One pass of the schedule: returns the next 16 subkeys and leaves `x`
/// in the state the following pass starts from.
fn pass(x: &mut Words) -> [u32; 16] {
    let mut k = [0u32; 16];
    let z = z_from_x(x);
    extract(&z, 0, &mut k[0..4]);
    *x = x_from_z(&z);
    extract(x, 1, &mut k[4..8]);
    let z = z_from_x(x);
    extract(&z, 2, &mut k[8..12]);
    *x = x_from_z(&z);
    extract(x, 3, &mut k[12..16]);
    k
}

pub fn key_schedule(key: &MasterKey) -> RoundKeys {
    let padded = key.padded();
    let mut x: Words = [0; 4];
    for (w, chunk) in x.iter_mut().zip(padded.chunks_exact(4)) {
        *w = u32::from_be_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
    }
    let km = pass(&mut x);
    let kr_full = pass(&mut x);
    let mut kr = [0u8; 16];
    for (r, k) in kr.iter_mut().zip(kr_full) {
        *r = (k & 0x1f) as u8;
    }
    RoundKeys { km, kr }
}
