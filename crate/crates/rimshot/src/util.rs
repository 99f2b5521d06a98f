//! Small numeric and RNG helpers shared across modules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance (n-1 denominator); 0.0 for fewer than two values.
pub(crate) fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
}

pub(crate) fn sample_sd(values: &[f64]) -> f64 {
    sample_variance(values).sqrt()
}

/// SplitMix64 mixing step, used to derive independent RNG streams.
pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn mix(seed: u64, value: u64) -> u64 {
    splitmix64(seed ^ value.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Deterministic per-item RNG stream derived from a master seed and tags.
/// The stream depends only on the tag values, never on scheduling order, so
/// parallel generation stays reproducible.
pub(crate) fn stream_rng(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    for &t in tags {
        h = mix(h, t);
    }
    ChaCha8Rng::seed_from_u64(h)
}
