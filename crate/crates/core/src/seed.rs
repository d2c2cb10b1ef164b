//! Deterministic seed derivation.
//!
//! A child seed is a stable hash of `(master seed, purpose label, index)`, so
//! trial `i` of an estimator draws the same numbers no matter how trials are
//! scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used by every sampler in this crate.
pub type SimRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Derives the seed for `(label, index)` under `master`.
pub fn child_seed(master: u64, label: &str, index: u64) -> u64 {
    splitmix(splitmix(splitmix(master) ^ fnv1a(label)) ^ index.wrapping_mul(GOLDEN))
}

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn child_rng(master: u64, label: &str, index: u64) -> SimRng {
    rng(child_seed(master, label, index))
}
