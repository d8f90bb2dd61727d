use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

// SplitMix64 output finalizer; a bijection on u64.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the RNG stream of one trial.
///
/// For a fixed master seed the map `trial_index → seed` is injective: the
/// index enters through an odd-multiplier Weyl step and then a bijective
/// finalizer. Nothing depends on scheduling, so any worker can compute any
/// trial's stream.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    let base = mix64(master_seed);
    mix64(base.wrapping_add(GOLDEN_GAMMA.wrapping_mul(trial_index.wrapping_add(1))))
}

pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_trial_seed(master_seed, trial_index))
}
