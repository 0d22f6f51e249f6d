//! Seeding conventions.
//!
//! Every randomized routine takes a 64-bit seed and drives a ChaCha8 stream
//! cipher generator (counter based, so seeding is cheap and streams for
//! distinct seeds are independent). Derived seeds for sub-tasks are produced
//! by [`mix`] / [`mix3`], which fold indices into the parent seed with the
//! SplitMix64 finalizer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::norm;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of sub-task `index` from `seed`.
pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Derive the seed of sub-task `(i, j)` from `seed`.
pub fn mix3(seed: u64, i: u64, j: u64) -> u64 {
    mix(mix(seed, i), j)
}

/// A uniformly random point on the unit sphere of `R^m`.
pub fn random_unit(rng: &mut impl rand::Rng, m: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = norm(&g);
        if nrm > 1e-12 {
            return g.into_iter().map(|v| v / nrm).collect();
        }
    }
}
