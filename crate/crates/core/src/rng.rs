//! Seeded random streams.
//!
//! Every stochastic consumer (an OD cell, a vehicle's dawdling) draws from its
//! own ChaCha8 stream whose seed is a stable hash of the master seed and a
//! key. Streams are therefore independent of iteration order and of the
//! platform's `Hash` implementation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Builds a stream key from heterogeneous parts.
#[derive(Debug, Clone)]
pub struct StreamKey {
    state: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64) -> Self {
        Self {
            state: splitmix64(master_seed ^ FNV_OFFSET),
        }
    }

    pub fn str(mut self, s: &str) -> Self {
        let mut h = FNV_OFFSET;
        for b in s.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        // length-prefix so ("ab","c") and ("a","bc") differ
        self.state = splitmix64(self.state ^ h ^ (s.len() as u64).rotate_left(32));
        self
    }

    pub fn u64(mut self, v: u64) -> Self {
        self.state = splitmix64(self.state ^ splitmix64(v));
        self
    }

    pub fn seed(&self) -> u64 {
        self.state
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.state)
    }
}
