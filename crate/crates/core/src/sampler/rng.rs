//! Seeded random streams.
//!
//! Every stochastic stage draws from ChaCha8 keyed by a 64-bit seed. Chain
//! `c` of a run uses stream `c` of the run seed, so chain 0 is exactly the
//! single-chain run and adding chains never perturbs existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SamplerRng = ChaCha8Rng;

pub fn chain_rng(seed: u64, chain: u64) -> SamplerRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}
