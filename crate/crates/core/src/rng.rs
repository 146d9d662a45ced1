//! Reproducible random streams keyed by `(master seed, stream index)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent ChaCha stream for `(master_seed, stream)`. The same pair
/// always yields the same sequence regardless of thread or call order.
pub fn stream(master_seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Stream index namespaced by a per-estimator tag so different estimators
/// sharing one master seed do not reuse randomness.
pub fn tagged_stream(master_seed: u64, tag: u16, index: u64) -> StreamRng {
    debug_assert!(index < (1 << 48));
    stream(master_seed, ((tag as u64) << 48) | index)
}
