//! Seed derivation for independent, schedule-free random streams.
//!
//! Every randomized work item (one shuffle, one rolling window in one
//! direction, one synthetic series) gets its own ChaCha8 stream whose seed is
//! a hash of the user seed and the item's coordinates. Results therefore do
//! not depend on which thread runs which item, or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds stream coordinates into a base seed.
pub fn derive(seed: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(mix(seed.wrapping_add(GOLDEN)), |acc, &c| {
        mix(acc ^ mix(c.wrapping_add(GOLDEN)))
    })
}

pub fn stream(seed: u64, coords: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, coords))
}

/// FNV-1a, for turning identifiers such as tickers into stream coordinates.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
