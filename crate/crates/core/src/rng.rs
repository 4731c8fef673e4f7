//! Deterministic random streams.
//!
//! Every random quantity in the library is drawn from a stream derived from
//! a single master seed by a counter-based scheme:
//!
//! * trial `t` of a Monte-Carlo run uses `derive_seed(master, t)`,
//! * within a trial, the channel draw uses substream [`STREAM_CHANNEL`] and
//!   the pilot noise draw uses substream [`STREAM_PILOT_NOISE`],
//!
//! so the bytes consumed by one trial never depend on how trials are
//! scheduled across threads. Generators are ChaCha8, which produces the
//! same sequence on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Substream index for channel coefficient draws within one trial.
pub const STREAM_CHANNEL: u64 = 0;

/// Substream index for pilot noise draws within one trial.
pub const STREAM_PILOT_NOISE: u64 = 1;

/// SplitMix64 finalizer; full-period bijective mixer on `u64`.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of substream `stream` of `seed`.
///
/// The stream index goes through one SplitMix64 round before being folded
/// into the parent seed, so neighbouring indices (0, 1, 2, ...) produce
/// decorrelated children.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed.wrapping_add(splitmix64(stream)))
}

/// Instantiates the generator for `seed`.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Instantiates the generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    rng_from_seed(derive_seed(seed, stream))
}
