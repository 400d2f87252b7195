//! Counter-based seed derivation.
//!
//! Every random stream in a run is addressed by `(master_seed, stream, index)`
//! and mapped to an independent 64-bit seed with a SplitMix64-style finalizer.
//! Workers never share generator state, so results do not depend on how
//! realizations are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Generator used for all sampling.
pub type Rng = ChaCha12Rng;

/// Logical random streams within one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Background = 1,
    Coupling = 2,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed, a stream id and a counter into one seed.
pub fn mix(master_seed: u64, stream: u64, index: u64) -> u64 {
    let a = splitmix(master_seed.wrapping_add(GOLDEN));
    let b = splitmix(a ^ stream.wrapping_mul(GOLDEN).wrapping_add(0x632b_e59b_d9b4_e019));
    splitmix(b ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03).wrapping_add(GOLDEN))
}

/// Seed of realization `index` for one stream.
pub fn realization_seed(master_seed: u64, stream: Stream, index: u64) -> u64 {
    mix(master_seed, stream as u64, index)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
