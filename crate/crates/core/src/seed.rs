//! Deterministic seed derivation for sweeps.
//!
//! Every run in a sweep gets its own stream seeded from
//! `(base_seed, point, run)`, so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `run` at grid point `point` of a sweep seeded by `base`.
pub fn derive(base: u64, point: u64, run: u64) -> u64 {
    mix64(mix64(mix64(base) ^ point) ^ run.rotate_left(32))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
