//! Seed derivation for reproducible, order-independent replica streams.
//!
//! Every random stream in the crate is a ChaCha8 generator keyed by a 64-bit
//! seed. Campaign seeds are derived with [`mix`], a SplitMix64-style
//! finaliser, so replica `r` of a campaign always receives the same stream no
//! matter which worker runs it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Weyl increment (golden ratio scaled to 2^64).
pub const MIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// First multiplier of the SplitMix64 finaliser.
pub const MIX_M1: u64 = 0xBF58_476D_1CE4_E5B9;
/// Second multiplier of the SplitMix64 finaliser.
pub const MIX_M2: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 output function.
pub fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_M1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_M2);
    z ^ (z >> 31)
}

/// Derive the seed of sub-stream `stream` from `master`.
///
/// `mix(m, s) = finalize(finalize(m) ^ (s + 1) * MIX_GAMMA)` with wrapping
/// arithmetic. Distinct `(m, s)` pairs give statistically unrelated seeds.
pub fn mix(master: u64, stream: u64) -> u64 {
    finalize(finalize(master) ^ stream.wrapping_add(1).wrapping_mul(MIX_GAMMA))
}

/// Fold several stream tags into one seed, left to right.
pub fn mix_all(master: u64, streams: &[u64]) -> u64 {
    streams.iter().fold(master, |acc, &s| mix(acc, s))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
