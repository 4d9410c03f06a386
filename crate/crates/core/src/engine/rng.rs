//! Independent random streams keyed by (run seed, node, purpose).
//!
//! Mobility draws never share a stream with traffic or Hello phases, so two
//! protocols run on the same seed see identical node trajectories.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Mobility = 1,
    HelloPhase = 2,
    Traffic = 3,
}

/// Stream owner for draws that belong to no particular node.
pub const GLOBAL_STREAM: u64 = u64::MAX;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, owner: u64, purpose: Purpose) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(splitmix64(seed) ^ owner) ^ purpose as u64);
    ChaCha8Rng::seed_from_u64(key)
}
