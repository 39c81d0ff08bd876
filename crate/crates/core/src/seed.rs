//! Seed derivation.
//!
//! Every stochastic draw in the crate comes from a ChaCha8 stream whose seed
//! is derived here, so results depend only on the configured 64-bit seeds and
//! never on thread scheduling.
//!
//! The mixing function is SplitMix64's finalizer:
//!
//! ```text
//! z = x + 0x9E3779B97F4A7C15
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z ^ (z >> 31)
//! ```
//!
//! * oscillator `k` of a network with seed `s` draws from
//!   `splitmix64(s + k * GOLDEN)`;
//! * sweep cell `(x, y)` with base seed `b` uses the network seed
//!   `splitmix64(splitmix64(b ^ x * CELL_X) ^ y * CELL_Y)`.
//!
//! All arithmetic wraps.

/// Weyl increment of SplitMix64.
pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const CELL_X: u64 = 0xD1B5_4A32_D192_ED03;
const CELL_Y: u64 = 0x8CB9_2BA7_2F3D_8DD7;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of oscillator `index`'s private noise stream.
///
/// `oscillator_stream_seed(s, k) == oscillator_stream_seed(s + k * GOLDEN, 0)`,
/// which lets a single-oscillator network replay the stream that oscillator
/// `k` sees inside a larger one.
pub fn oscillator_stream_seed(network_seed: u64, index: usize) -> u64 {
    splitmix64(network_seed.wrapping_add((index as u64).wrapping_mul(GOLDEN)))
}

/// Network seed for sweep cell `(x, y)`.
pub fn cell_seed(base_seed: u64, x: usize, y: usize) -> u64 {
    let a = splitmix64(base_seed ^ (x as u64).wrapping_mul(CELL_X));
    splitmix64(a ^ (y as u64).wrapping_mul(CELL_Y))
}
