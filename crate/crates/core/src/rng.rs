//! Seeded, portable pseudo-random number generation.
//!
//! Training runs must replay bit-identically from a seed, on any platform,
//! across releases. Instead of depending on an external generator whose
//! stream might change between versions, the crate ships a tiny fixed one:
//!
//! * state update: xorshift64* (`x ^= x >> 12; x ^= x << 25; x ^= x >> 27`),
//!   output `x.wrapping_mul(0x2545_F491_4F6C_DD1D)`;
//! * seeding: the raw seed is mixed once with splitmix64 so that small
//!   consecutive seeds (0, 1, 2, ...) start from unrelated states.
//!
//! All derived draws (`next_f64`, `uniform_index`) are defined purely in
//! terms of `next_u64` and exact integer/IEEE-754 arithmetic, so the whole
//! stream is reproducible everywhere.

/// Deterministic 64-bit generator. Cloning captures the stream state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    /// Creates a generator from a seed. Any seed is valid, including 0.
    pub fn new(seed: u64) -> Self {
        let mixed = splitmix64(seed);
        Rng64 {
            // xorshift has a single fixed point at 0; remap it.
            state: if mixed == 0 { 0x9E37_79B9_7F4A_7C15 } else { mixed },
        }
    }

    /// Next raw 64-bit value.
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `[0, n)`. `n` must be positive.
    pub fn uniform_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "uniform_index requires n > 0");
        let i = (self.next_f64() * n as f64) as usize;
        i.min(n - 1)
    }
}

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
