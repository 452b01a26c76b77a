//! Per-trial random streams.
//!
//! Each stream is a ChaCha8 generator keyed by the root seed and a purpose
//! tag, with the stream id built from the grid index and trial number. Two
//! streams never share state, so enabling a method or reordering work cannot
//! change another stream's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    /// Source and sensor positions; shared across the p grid.
    Geometry = 1,
    /// Which links are NLOS.
    Links = 2,
    /// Angle noise.
    Noise = 3,
    /// Annealing chain.
    Annealing = 4,
}

/// Generator for `(seed, purpose, grid index, trial)`.
pub fn stream(seed: u64, purpose: Purpose, grid_index: u32, trial: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream((u64::from(grid_index) << 32) | u64::from(trial));
    rng
}
