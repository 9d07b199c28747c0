//! Stateless 64-bit seed derivation.
//!
//! Every Monte Carlo run draws from a stream keyed by
//! `(master_seed, scenario_id, run_index)`, so results do not depend on how
//! runs are scheduled across workers.

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed for one run of one scenario.
#[inline]
pub fn run_seed(master_seed: u64, scenario_id: u64, run_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ scenario_id) ^ run_index)
}
