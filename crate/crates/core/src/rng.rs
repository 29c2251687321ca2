//! Reproducible random streams.
//!
//! Every sampled quantity is computed in fixed-size blocks. Block `k` of a
//! run with seed `s` draws from ChaCha8 seeded with `seed_from_u64(s)` on
//! stream `k`, so results do not depend on how blocks are spread over
//! threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Samples per block.
pub const BLOCK: u64 = 1024;

/// The generator for block `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `(block index, samples in block)` covering `samples` draws.
pub fn blocks(samples: u64) -> impl Iterator<Item = (u64, u64)> + Clone {
    let full = samples / BLOCK;
    let rest = samples % BLOCK;
    (0..full)
        .map(|k| (k, BLOCK))
        .chain((rest > 0).then_some((full, rest)))
}
