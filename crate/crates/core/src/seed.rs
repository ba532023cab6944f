//! Deterministic seed splitting.
//!
//! Every random stream in a simulation is keyed by a tuple of integers
//! (master seed, grid index, trial index, stream tag). The tuple is folded
//! through the SplitMix64 finalizer one word at a time, so a stream's seed
//! depends only on its key and never on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags for the independent generators inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Bits = 1,
    Noise = 2,
    Fading = 3,
    Preamble = 4,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `words` into `master`.
pub fn mix(master: u64, words: &[u64]) -> u64 {
    words.iter().fold(splitmix64(master), |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

/// Seed of one SNR grid point.
pub fn point_seed(master: u64, grid_index: usize, salt: u64) -> u64 {
    mix(master, &[grid_index as u64, salt])
}

/// Generator for one stream of one trial of one grid point.
pub fn trial_rng(point_seed: u64, trial: usize, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(point_seed, &[trial as u64, stream as u64]))
}

/// Stable 64-bit FNV-1a hash, used to salt seeds with detector names.
pub fn name_salt(name: &str) -> u64 {
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}
