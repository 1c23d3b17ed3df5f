//! Seeded randomness. Every random draw in the crate flows from an explicit `u64` seed
//! through [`SeededRng`], a PCG generator with 64 bits of state (PCG-XSH-RR 64/32).

use rand::SeedableRng;

pub type SeededRng = rand_pcg::Pcg32;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// SplitMix64 finalizer. Stable across platforms and releases.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combine a sequence of words into one seed; order matters.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x5851_f42d_4c95_7f2d, |acc, &p| mix64(acc ^ mix64(p)))
}
