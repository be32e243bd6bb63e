//! Named deterministic random streams.
//!
//! Every random decision in the crate draws from a `ChaCha8Rng` keyed by
//! `(seed, label, index)`. Streams with different labels are independent,
//! so adding a consumer never perturbs existing ones, and nothing here
//! touches global RNG state.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; mixes one word into an avalanche.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the substream key for `(seed, label, index)`.
pub fn stream_key(seed: u64, label: &str, index: u64) -> u64 {
    let mut h = mix(seed);
    for &b in label.as_bytes() {
        h = mix(h ^ u64::from(b));
    }
    mix(h ^ index)
}

/// A seeded counter-based generator for the named substream.
pub fn stream(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_key(seed, label, index))
}

/// One standard-normal draw.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(rand_distr::StandardNormal)
}

/// `0..n` shuffled by the named stream.
pub fn shuffled_indices(n: usize, seed: u64, label: &str) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut stream(seed, label, 0));
    indices
}
