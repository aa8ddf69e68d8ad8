//! Reproducible random streams.
//!
//! A stream `(seed, id)` is ChaCha20 keyed by `seed_from_u64(seed)` with its
//! 64-bit stream counter set to `id`. Distinct ids under one seed give
//! disjoint keystreams; the output is identical on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Shorthand for `RngStream::new(seed, stream).rng()`.
pub fn stream(seed: u64, stream: u64) -> ChaCha20Rng {
    RngStream::new(seed, stream).rng()
}
