//! Counter-based seed derivation.
//!
//! Every random quantity in the crate is drawn from a stream seeded by
//! mixing a master seed with a path of integer labels (replicate index,
//! method index, held-out index, ...). Results are therefore independent
//! of thread scheduling: a stream's seed depends only on its path.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche behaviour for cheap mixing.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a path of labels.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = mix(master);
    for &part in path {
        state = mix(state ^ mix(part.wrapping_add(0xA076_1D64_78BD_642F)));
    }
    state
}

/// A deterministic RNG for the stream identified by `(master, path)`.
pub fn stream_rng(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}
