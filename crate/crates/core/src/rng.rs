//! Deterministic per-task random streams.
//!
//! Every randomized computation draws from a ChaCha8 stream keyed by the user
//! seed and a small tuple of tags (blow-up size, trial index, gate id, ...).
//! Results therefore do not depend on how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h: u64 = 0x243f_6a88_85a3_08d3;
    for &t in tags {
        h = (h ^ t).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        h ^= h >> 31;
    }
    rng.set_stream(h);
    rng
}
