//! Seeded, portable random streams.
//!
//! Every randomized operation draws from ChaCha8 seeded with
//! `ChaCha8Rng::seed_from_u64(seed)` and then switched to a 64-bit stream
//! number with `set_stream(stream)`. Distinct stream numbers give
//! independent sequences, so work items (batches, rasters, instances) can be
//! generated in any order or in parallel and still reproduce exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in `[lo, hi]`; returns `lo` when the interval is a point.
pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    (lo + u * (hi - lo)).clamp(lo, hi)
}
