//! Seeded random streams.
//!
//! Every stream is a xoshiro256++ generator whose state is expanded by
//! SplitMix64 from a 64-bit key. Keys are derived from a master seed, a tag
//! and a list of indices, so any draw can be reproduced on its own without
//! replaying earlier ones.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key for `(seed, tag, indices)`.
pub fn derive_key(seed: u64, tag: &str, indices: &[u64]) -> u64 {
    let mut h = splitmix(seed);
    for b in tag.bytes() {
        h = splitmix(h ^ u64::from(b));
    }
    h = splitmix(h ^ 0xFF);
    for &i in indices {
        h = splitmix(h ^ i);
    }
    h
}

pub fn stream(seed: u64, tag: &str, indices: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_key(seed, tag, indices))
}

/// One uniform draw in `[0, 1)` from its own stream.
pub fn uniform(seed: u64, tag: &str, indices: &[u64]) -> f64 {
    stream(seed, tag, indices).gen::<f64>()
}
