//! Seeded random streams.
//!
//! Every randomized operation takes a `u64` seed. Trial `i` of an experiment
//! draws from stream `i` of the ChaCha20 generator keyed by that seed, so
//! trials are independent of execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Identifier echoed in reports so runs can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str = "chacha20/rand_chacha-0.3:seed_from_u64+stream";

pub type Stream = ChaCha20Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent substream `index` for the given seed.
pub fn substream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed, for nesting experiments inside trials.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    substream(seed, index | (1 << 63)).next_u64()
}
