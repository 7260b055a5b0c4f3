//! Deterministic random substreams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SubRng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, frame, index)`.
///
/// Every particle of every frame owns its own stream, which makes particle
/// propagation independent of how work is split across threads.
pub fn substream(seed: u64, frame: u64, index: u64) -> SubRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, frame, index))
}

/// Seed of the substream `(seed, frame, index)`.
pub fn derive_seed(seed: u64, frame: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ frame) ^ index)
}
