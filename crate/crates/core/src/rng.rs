//! SplitMix64, a counter-based 64-bit generator.
//!
//! Output `i` (0-based) of a stream seeded with `s` is
//! `mix64(s + (i + 1) * 0x9E3779B97F4A7C15)` with wrapping arithmetic, where
//!
//! ```text
//! mix64(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!           z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!           return z ^ (z >> 31)
//! ```
//!
//! A draw below `k` is `(u * k) >> 64` on the 128-bit product, and a unit
//! float is `(u >> 11) * 2^-53`. Every sequence is therefore reproducible in
//! any language with 64-bit integers.

pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Output `index` of the stream seeded with `seed`.
#[inline]
pub fn nth(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// Seed of the `index`-th independent sub-stream (trial, restart).
pub fn derive(seed: u64, index: u64) -> u64 {
    nth(seed, index)
}

#[inline]
pub fn below(u: u64, k: u64) -> u64 {
    ((u as u128 * k as u128) >> 64) as u64
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, k: u64) -> u64 {
        below(self.next_u64(), k)
    }
}
