//! The crate-wide deterministic random stream.
//!
//! All randomized operations draw from [`SplitMix64`], the 64-bit mixer of
//! Steele, Lea and Flood. The full definition, so that other implementations
//! can reproduce the streams bit for bit:
//!
//! ```text
//! state := state + 0x9E3779B97F4A7C15                 (mod 2^64)
//! z := state
//! z := (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9         (mod 2^64)
//! z := (z XOR (z >> 27)) * 0x94D049BB133111EB         (mod 2^64)
//! output := z XOR (z >> 31)
//! ```
//!
//! Derived conventions, also normative:
//!
//! * `unit_f64` maps one output to `[0, 1)` as `(output >> 11) * 2^-53`.
//! * `below(n)` draws one `unit_f64` and returns `floor(u * n)`, clamped to
//!   `n - 1`.
//! * Named sub-streams are derived with [`derive_stream`]: the tag string is
//!   hashed with 64-bit FNV-1a, XORed into the seed, and one SplitMix64
//!   output of that state becomes the sub-stream seed.

/// Seed for any randomized operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

/// SplitMix64 stream generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: Seed) -> Self {
        Self { state: seed.0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of resolution.
    pub fn unit_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform index in `[0, n)`. `n` must be non-zero.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let idx = (self.unit_f64() * n as f64) as usize;
        idx.min(n - 1)
    }
}

/// 64-bit FNV-1a over a byte string.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x1_0000_0000_01b3);
    }
    hash
}

/// Derives an independent named sub-stream from a global seed, so that
/// per-shape work can be scheduled in any order without changing results.
pub fn derive_stream(seed: Seed, tag: &str) -> Seed {
    let mixed = seed.0 ^ fnv1a(tag.as_bytes());
    Seed(SplitMix64::new(Seed(mixed)).next_u64())
}
