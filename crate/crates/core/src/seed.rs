//! Keyed seed derivation. Every random stream in a run is a pure function of
//! the run seed, a stream tag and an index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TAG_SAMPLER: u64 = 0x5341_4d50;
pub const TAG_PATH: u64 = 0x5041_5448;
pub const TAG_INIT: u64 = 0x494e_4954;
pub const TAG_SCENARIO: u64 = 0x5343_454e;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ tag) ^ index)
}

pub fn stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, tag, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_separate_streams() {
        assert_eq!(derive(1, TAG_PATH, 3), derive(1, TAG_PATH, 3));
        assert_ne!(derive(1, TAG_PATH, 3), derive(1, TAG_PATH, 4));
        assert_ne!(derive(1, TAG_PATH, 3), derive(1, TAG_SAMPLER, 3));
        assert_ne!(derive(1, TAG_PATH, 3), derive(2, TAG_PATH, 3));
    }
}
