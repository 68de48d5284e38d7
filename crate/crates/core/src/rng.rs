//! Seed derivation and the random streams used throughout the crate.
//!
//! All randomness comes from [`ChaCha8Rng`] streams, which produce the same
//! sequence on every platform. Independent streams are split off a seed by
//! hashing it together with a tag:
//!
//! ```text
//! mix(parts) = fold(h = 0x243F6A8885A308D3, p -> splitmix64(h ^ splitmix64(p)))
//! ```
//!
//! and string tags are reduced to `u64` with 64-bit FNV-1a.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random tape type consumed by the algorithms and generators.
pub type TapeRng = ChaCha8Rng;

/// The SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Order-sensitive 64-bit mix of several words.
pub fn mix(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |h, &p| splitmix64(h ^ splitmix64(p)))
}

/// 64-bit FNV-1a hash of a tag string.
pub fn tag_hash(tag: &str) -> u64 {
    tag.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// A seed from which named, independent random streams are split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStream(u64);

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn seed(self) -> u64 {
        self.0
    }

    /// Child stream identified by a string tag.
    pub fn split(self, tag: &str) -> SeedStream {
        SeedStream(mix(&[self.0, tag_hash(tag)]))
    }

    /// Child stream identified by an integer index.
    pub fn split_index(self, index: u64) -> SeedStream {
        SeedStream(mix(&[self.0, index]))
    }

    pub fn rng(self) -> TapeRng {
        TapeRng::seed_from_u64(self.0)
    }
}

/// Seed of one experiment trial.
pub fn trial_seed(base_seed: u64, algorithm_tag: &str, budget: u64, trial: u64) -> u64 {
    mix(&[base_seed, tag_hash(algorithm_tag), budget, trial])
}
