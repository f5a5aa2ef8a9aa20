//! Seeded generators. Every stochastic routine takes a generator handle; trial
//! generators are independent ChaCha streams of a single master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Seed used when none is supplied on the command line or in a config file.
pub const DEFAULT_SEED: u64 = 20_230_517;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Generator for stream `stream` of `master`. Stream 0 is reserved for
/// scenario construction; trial `t` uses stream `t + 1`.
pub fn stream_rng(master: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

pub fn trial_rng(master: u64, trial: usize) -> SimRng {
    stream_rng(master, trial as u64 + 1)
}

/// Deterministic 64-bit seed derived from `(master, index)` (SplitMix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
