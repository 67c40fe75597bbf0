//! Seeded randomness.
//!
//! Every random draw in the crate comes from a `ChaCha8Rng` built here, so a
//! run is fully determined by its seed. Independent consumers of one user
//! seed (weight init, flip selection, measurement) use distinct ChaCha
//! streams or derived seeds and never share a generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used for weight initialization.
pub const STREAM_INIT: u64 = 0;
/// Stream used for choosing which bits to flip during training.
pub const STREAM_FLIP: u64 = 1;
/// Stream used to derive per-measurement sampling seeds.
pub const STREAM_MEASURE: u64 = 2;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed from `(base, index)` with the SplitMix64 finalizer.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
