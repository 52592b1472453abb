//! Seed discipline.
//!
//! Every random quantity is drawn from a ChaCha8 stream addressed by
//! `(master seed, index, stream)`. The index is typically a replicate number;
//! the stream names what the draws are for, so changing how many draws one
//! stage consumes never shifts another stage's randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Topology = 1,
    Weights = 2,
    Model = 3,
    /// Stage one of the mixed design: cluster arm indicators.
    Arms = 4,
    /// Per-cluster treatment coins.
    ClusterCoins = 5,
    /// Per-unit treatment coins.
    UnitCoins = 6,
    /// Randomized clustering draws.
    Clustering = 7,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for item `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub fn stream_rng(master: u64, index: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, index));
    rng.set_stream(stream as u64);
    rng
}
