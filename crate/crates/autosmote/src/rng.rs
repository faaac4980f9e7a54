//! Deterministic random streams.
//!
//! All randomness in a run flows from a single root seed through named
//! substreams, so that any component (split, policy init, action sampling,
//! baseline sampling) can be reproduced in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named random substreams derived from one root seed.
///
/// The same `(root, name, index)` triple always yields the same stream,
/// on every platform.
#[derive(Debug, Clone, Copy)]
pub struct SeedTree {
    root: u64,
}

impl SeedTree {
    pub fn new(root: u64) -> Self {
        SeedTree { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// Derive a child tree, e.g. one per experiment seed.
    pub fn child(&self, name: &str, index: u64) -> SeedTree {
        SeedTree {
            root: mix(self.root, name, index),
        }
    }

    /// A fresh RNG for the named substream.
    pub fn stream(&self, name: &str) -> ChaCha8Rng {
        self.stream_indexed(name, 0)
    }

    /// A fresh RNG for the named substream with an index (e.g. actor id).
    pub fn stream_indexed(&self, name: &str, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix(self.root, name, index))
    }
}

/// FNV-1a over the name, then SplitMix64 finalization.
fn mix(root: u64, name: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(root ^ h.rotate_left(17) ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
