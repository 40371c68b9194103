//! Splittable deterministic random streams.
//!
//! Every random draw in the simulators is keyed by a path in a seed tree:
//! replicate index, then generation or tree position, then child index. A
//! node's stream depends only on its path and the root seed, never on
//! traversal order or thread scheduling, which is what makes the Monte Carlo
//! estimates bit-reproducible under `rayon` parallelism.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// SplitMix64 finalizer; a fixed bijective mixer on u64.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A position in the seed tree. Copyable; children are derived by hashing,
/// so sibling subtrees get statistically independent streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        StreamKey(mix64(seed ^ 0x5851_F42D_4C95_7F2D))
    }

    /// Key of the `index`-th child.
    pub fn child(self, index: u64) -> Self {
        StreamKey(mix64(self.0 ^ mix64(index.wrapping_add(0xA076_1D64_78BD_642F))))
    }

    /// Leaf generator for this node.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}
