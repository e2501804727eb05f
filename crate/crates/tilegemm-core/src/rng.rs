//! Deterministic 64-bit PRNG (SplitMix64).
//!
//! Everything randomized in this workspace (matrix data, precision maps)
//! flows through this generator so that a seed pins the run bit-for-bit on
//! every platform.

/// SplitMix64 generator state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Rng64 { state: seed }
    }

    /// Next raw 64-bit output, advancing the state.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform FP64 in `[-1, 1)`.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        unit_from_bits(self.next_u64())
    }
}

/// Maps a raw 64-bit draw onto `[-1, 1)`: the top 53 bits form an exact
/// dyadic value in `[0, 1)`, then scale and shift (both exact).
#[inline]
pub fn unit_from_bits(u: u64) -> f64 {
    ((u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)) * 2.0 - 1.0
}
