//! Seed derivation for order-independent parallel determinism.
//!
//! Every unit of work (clip, frame, prototype) gets its own generator,
//! seeded from a splitmix64 hash of (parent seed, index). Workers can
//! therefore process units in any order without changing the output.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a work-unit index.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    let mut state = parent ^ index.wrapping_mul(GOLDEN);
    splitmix64(&mut state);
    splitmix64(&mut state)
}

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
