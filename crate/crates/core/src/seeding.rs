//! Deterministic seed derivation.
//!
//! Every randomized routine takes a master seed and derives independent
//! streams from it with SplitMix64, so results do not depend on thread
//! scheduling or on the order in which streams are requested.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One SplitMix64 output step.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of substream `stream` of `master`.
pub fn derive(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream.wrapping_add(0x632B_E59B_D9B4_E019)))
}

/// Seed of the two-level substream `(a, b)` of `master`.
pub fn derive2(master: u64, a: u64, b: u64) -> u64 {
    derive(derive(master, a), b)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
