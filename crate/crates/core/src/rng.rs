//! Deterministic random substreams.
//!
//! Every Monte Carlo trial owns a fixed window of a ChaCha8 keystream:
//! key from the master seed, stream id from the sweep row, word offset from
//! the trial index. Results therefore do not depend on scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::specfun::norm_quantile;

/// 32-bit words reserved per trial.
pub const WORDS_PER_TRIAL: u128 = 256;

/// Generator positioned at the start of `(row, trial)`.
pub fn substream(master_seed: u64, row: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(row);
    seek(&mut rng, trial);
    rng
}

/// Move an existing row generator to the start of `trial`.
pub fn seek(rng: &mut ChaCha8Rng, trial: u64) {
    rng.set_word_pos(trial as u128 * WORDS_PER_TRIAL);
}

/// Uniform on the open interval (0, 1), 53-bit resolution.
pub fn uniform_open<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal by inverse CDF.
pub fn std_normal<R: RngCore>(rng: &mut R) -> f64 {
    norm_quantile(uniform_open(rng))
}
