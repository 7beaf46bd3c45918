//! 64-bit avalanche mixing and a small deterministic generator.
//!
//! One fixed mixing function backs every place the crate needs a uniform
//! hash of an integer: head selection in c-trees, MIS priorities, and
//! synthetic data generation. Keeping it fixed (and seedless at the call
//! sites that need cross-structure agreement) makes structures that must
//! agree on hashes — e.g. two c-trees being unioned — agree by construction.

/// Process-wide seed for head selection. Part of the on-disk-free contract:
/// two c-trees only compose if they were built in a process using the same
/// seed, so it is a compile-time constant rather than a runtime parameter.
pub const HEAD_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Finalizer of the splitmix64 generator; full-avalanche mix of a 64-bit word.
#[inline]
pub fn mix64(x: u64) -> u64 {
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic sequential generator (splitmix64). Used for synthetic
/// streams and randomized tests; not a crypto source.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix64(self.state)
    }

    /// Uniform in `[0, bound)`. `bound` must be nonzero.
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Multiply-shift range reduction; bias is negligible for our bounds.
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
