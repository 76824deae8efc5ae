//! Deterministic expansion of one 64-bit master seed into arbitrarily many
//! parameter words.
//!
//! The expander advances an additive counter by an odd constant and
//! finalizes it with alternating shift-xor and odd-multiplier rounds, which
//! gives full avalanche between consecutive outputs. It replaces the
//! external initialization generator of the reference design: its only job
//! is to set per-thread parameters reproducibly.

/// Streaming word expander. Identical seeds yield identical streams on every
/// platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedExpander {
    state: u64,
}

impl SeedExpander {
    const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(master_seed: u64) -> Self {
        Self { state: master_seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_u32(&mut self) -> u32 {
        self.next_u64() as u32
    }

    /// Next word, skipping zero (for registers whose invariant forbids it).
    pub fn next_nonzero_u64(&mut self) -> u64 {
        loop {
            let v = self.next_u64();
            if v != 0 {
                return v;
            }
        }
    }

    pub fn next_nonzero_u32(&mut self) -> u32 {
        loop {
            let v = self.next_u32();
            if v != 0 {
                return v;
            }
        }
    }

    /// Uniform word in `0..bound` by rejection (`bound >= 1`).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound >= 1);
        let limit = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < limit {
                return v % bound;
            }
        }
    }
}
