//! Deterministic seed streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every randomized step.
pub type SolverRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the sub-stream `(seed, repeat, stream)`. Distinct coordinates give
/// unrelated streams, so adding a stream never perturbs the others.
pub fn derive_seed(seed: u64, repeat: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ repeat) ^ stream.rotate_left(32))
}

pub fn rng_from_seed(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct_and_stable() {
        let a = derive_seed(7, 0, 0);
        assert_eq!(a, derive_seed(7, 0, 0));
        assert_ne!(a, derive_seed(7, 1, 0));
        assert_ne!(a, derive_seed(7, 0, 1));
        assert_ne!(a, derive_seed(8, 0, 0));
        assert_ne!(derive_seed(7, 1, 0), derive_seed(7, 0, 1));
    }
}
