//! Deterministic seed derivation.
//!
//! Every randomized operation receives its own RNG seeded from
//! (global seed, operation tag, coordinates), so reruns are bit-for-bit
//! reproducible and concurrent cells never share a stream. Arms of a
//! paired contrast derive the shared components (hyperparameter draw,
//! partition, client selection) from seeds that exclude the contrasted
//! axis, which keeps the pairing meaningful.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Incremental FNV-1a based mixer for deriving child seeds.
#[derive(Debug, Clone, Copy)]
pub struct SeedDeriver(u64);

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

impl SeedDeriver {
    pub fn new(global_seed: u64) -> Self {
        SeedDeriver(FNV_OFFSET).mix_u64(global_seed)
    }

    pub fn mix_bytes(self, bytes: &[u8]) -> Self {
        let mut h = self.0;
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
        SeedDeriver(h)
    }

    pub fn mix_str(self, s: &str) -> Self {
        // Length prefix keeps ("ab","c") distinct from ("a","bc").
        self.mix_u64(s.len() as u64).mix_bytes(s.as_bytes())
    }

    pub fn mix_u64(self, v: u64) -> Self {
        self.mix_bytes(&v.to_le_bytes())
    }

    pub fn mix_f64(self, v: f64) -> Self {
        self.mix_u64(v.to_bits())
    }

    pub fn mix_bool(self, v: bool) -> Self {
        self.mix_u64(v as u64)
    }

    pub fn seed(self) -> u64 {
        // Final avalanche (splitmix64) so close inputs give unrelated seeds.
        let mut z = self.0.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed())
    }
}

/// RNG for a named sub-stream of a seed.
pub fn stream_rng(seed: u64, tag: &str) -> ChaCha8Rng {
    SeedDeriver::new(seed).mix_str(tag).rng()
}
