//! Seeded random streams.
//!
//! Every stochastic step draws from a ChaCha stream keyed by a tuple of
//! integers (master seed, client id, round, purpose). Streams never share
//! state, so results do not depend on the order clients are processed in.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose tags keep streams for the same (seed, client, round) apart.
pub mod purpose {
    pub const SUBSAMPLE: u64 = 1;
    pub const SHUFFLE: u64 = 2;
    pub const FEATURES: u64 = 3;
    pub const LABELS: u64 = 4;
    pub const SPLIT: u64 = 5;
    pub const ATTACK: u64 = 6;
    pub const TEMPLATE: u64 = 7;
    pub const CLIENT_META: u64 = 8;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a key tuple into a single 64-bit seed.
pub fn derive_seed(keys: &[u64]) -> u64 {
    keys.iter()
        .fold(0x005E_ED0F_70F0_u64, |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn stream(keys: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(keys))
}
