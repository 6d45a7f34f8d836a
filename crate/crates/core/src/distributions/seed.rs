//! Reproducible uniform streams.
//!
//! Every stream is a ChaCha8 keystream: the key comes from
//! `ChaCha8Rng::seed_from_u64(master_seed)` and the ChaCha stream (nonce) is
//! `stream_id`. Uniforms are built from the top 52 bits of each 64-bit word as
//! `((w >> 12) + 0.5) * 2^-52`, which lies strictly inside (0, 1) and is the
//! same on every platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    pub fn uniforms(&self) -> UniformStream {
        UniformStream { rng: self.rng() }
    }
}

/// Open-interval uniforms from a [`SeedSpec`].
#[derive(Debug, Clone)]
pub struct UniformStream {
    rng: ChaCha8Rng,
}

const TWO_POW_NEG_52: f64 = 1.0 / (1u64 << 52) as f64;

#[inline]
pub fn open_unit(word: u64) -> f64 {
    ((word >> 12) as f64 + 0.5) * TWO_POW_NEG_52
}

impl UniformStream {
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        open_unit(self.rng.next_u64())
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform index in `0..n` by rejection (no modulo bias). `n > 0`.
    pub fn next_index(&mut self, n: usize) -> usize {
        let n = n as u64;
        // Accept the largest multiple of n words.
        let rem = (u64::MAX % n + 1) % n;
        let limit = u64::MAX - rem;
        loop {
            let w = self.rng.next_u64();
            if w <= limit {
                return (w % n) as usize;
            }
        }
    }
}

impl Iterator for UniformStream {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(self.next_uniform())
    }
}
