//! Per-trajectory random streams.
//!
//! Every trajectory draws from its own ChaCha8 stream selected by
//! `(seed, index)`, so ensemble results do not depend on how trajectories are
//! distributed over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// The random stream of trajectory `index` under master seed `seed`.
pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A child seed for an independent family of streams (one p-value of a
/// grid, one engine of a comparison, ...).
pub fn derive_seed(seed: u64, domain: u64) -> u64 {
    // splitmix64 finalizer over the combined words
    let mut z = seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
