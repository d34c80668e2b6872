//! Deterministic stream derivation.
//!
//! A stream is identified by the experiment seed and a path of labels
//! (trial index, role, ...). Paths are folded through splitmix64 into a
//! ChaCha8 key, so streams are independent of evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const LABEL_INSTANCE: u64 = 1;
pub const LABEL_ADVERSARY: u64 = 2;
pub const LABEL_TESTER: u64 = 3;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fold(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |h, label| {
        splitmix64(h ^ splitmix64(*label))
    })
}

pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    let mut key = [0u8; 32];
    let mut h = fold(seed, path);
    for chunk in key.chunks_mut(8) {
        h = splitmix64(h);
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Keyed 64-bit hash used for stateless pseudorandom functions.
#[inline]
pub fn keyed_hash(key: u64, x: u64) -> u64 {
    splitmix64(splitmix64(key) ^ x.rotate_left(17) ^ splitmix64(x))
}
