//! Generators, deterministic seeding and the suite runner.

pub mod gen;
pub mod suite;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use gen::{generate, GenError, GeneratorSpec, Instance, Size};
pub use suite::{run_suite, CheckSpec, RunReport, SuiteConfig, SuiteSpec};

/// One round of the split-mix 64-bit mixer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of instance `index` under master seed `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
