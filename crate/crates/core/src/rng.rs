//! Keyed, reproducible random streams.
//!
//! Each stream is a ChaCha8 generator whose 256-bit key is derived from the
//! master seed and a [`StreamKey`]. The key words pass through a bijective
//! mixer, so distinct `(seed, key)` tuples give distinct ChaCha keys.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifies one stream under a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    /// What the stream is used for (data, bootstrap, randomizer, ...).
    pub purpose: u64,
    /// The study cell, e.g. a hash of the distribution label and sample size.
    pub cell: u64,
    /// Replication index within the cell.
    pub index: u64,
}

impl StreamKey {
    pub const fn new(purpose: u64, cell: u64, index: u64) -> Self {
        Self { purpose, cell, index }
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, key: StreamKey) -> Self {
        let words = [
            mix64(master_seed ^ 0x9E37_79B9_7F4A_7C15),
            mix64(key.purpose ^ 0xD1B5_4A32_D192_ED03),
            mix64(key.cell ^ 0x8CB9_2BA7_2F3D_8DD7),
            mix64(key.index ^ 0xABC9_8388_FB8F_AC03),
        ];
        let mut seed = [0u8; 32];
        for (chunk, w) in seed.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        Self {
            inner: ChaCha8Rng::from_seed(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..bound` by rejection (no modulo bias).
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "empty range");
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return (x % bound) as usize;
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
