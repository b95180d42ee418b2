//! Seeded, splittable random streams.
//!
//! Every trial draws from its own ChaCha8 stream, selected by
//! `(master seed, stream id)`. ChaCha8 is fully specified, so a given seed
//! reproduces the same samples on every platform and regardless of how
//! trials are scheduled across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Independent stream number `stream` under `master_seed`.
pub fn trial_rng(master_seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for trial `trial` of grid point `point`.
pub fn stream_id(point: u32, trial: u32) -> u64 {
    (u64::from(point) << 32) | u64::from(trial)
}
