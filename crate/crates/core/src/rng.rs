//! Seeded randomness.
//!
//! Every stochastic step draws from xoshiro256** whose 256-bit state is filled
//! by the splitmix64 stream started at the user seed. Uniform variates take the
//! top 53 bits of a 64-bit output, so instance files and sample sets are
//! reproducible from their seed by any implementation of the same generator.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

pub type Rng = Xoshiro256StarStar;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// One splitmix64 output for state `x`: advances by the golden gamma, then mixes.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// Uniform in `[0, 1)` with 53 bits of resolution.
pub fn uniform01(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One Bernoulli draw consuming exactly one generator output.
pub fn bernoulli(rng: &mut Rng, p: f64) -> bool {
    uniform01(rng) < p
}
