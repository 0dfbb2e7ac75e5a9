//! Deterministic counter-based random streams.
//!
//! Every source of randomness in the engine is an [`RngStream`] addressed by a
//! `(seed, generation, stream)` key. A stream is a pure function of its key:
//! the n-th draw from a stream is always the same value, no matter which
//! thread performs it or in which order streams are consumed. This is what
//! makes parallel selection and mutation reproducible across worker counts.
//!
//! The generator behind a stream is ChaCha8, a counter-mode stream cipher:
//! identical key + counter always yield identical output, and the counter can
//! be saved and restored.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Address of one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub generation: u64,
    pub stream: u64,
}

/// A deterministic random stream identified by a [`StreamKey`].
#[derive(Debug, Clone)]
pub struct RngStream {
    key: StreamKey,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, generation: u64, stream: u64) -> Self {
        Self::from_key(StreamKey {
            seed,
            generation,
            stream,
        })
    }

    pub fn from_key(key: StreamKey) -> Self {
        let mut seed = [0u8; 32];
        seed[0..8].copy_from_slice(&key.seed.to_le_bytes());
        seed[8..16].copy_from_slice(&key.generation.to_le_bytes());
        seed[16..24].copy_from_slice(&key.stream.to_le_bytes());
        Self {
            key,
            inner: ChaCha8Rng::from_seed(seed),
        }
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    /// Current draw position within the stream.
    pub fn counter(&self) -> u128 {
        self.inner.get_word_pos()
    }

    /// Repositions the stream at an absolute draw position.
    pub fn set_counter(&mut self, counter: u128) {
        self.inner.set_word_pos(counter);
    }

    /// Uniform draw from `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        self.gen()
    }

    /// Uniform index in `[0, n)`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        self.gen_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
