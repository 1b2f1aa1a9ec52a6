//! Counter-based per-trial randomness.
//!
//! Every Monte Carlo trial draws from a ChaCha stream keyed on
//! `(global seed, trial index)`, so results do not depend on how trials are
//! distributed over workers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for stream `stream` of trial `trial`.
pub fn stream_rng(seed: u64, trial: u64, stream: u64) -> ChaCha8Rng {
    let mut state = seed
        ^ trial.wrapping_mul(0xA076_1D64_78BD_642F)
        ^ stream.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

/// Measurement-randomness stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    stream_rng(seed, trial, 0)
}

/// Noise-sampling stream for one trial, kept separate from measurement
/// randomness so two implementations of the same protocol see identical
/// error patterns per trial.
pub fn noise_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    stream_rng(seed, trial, 1)
}
