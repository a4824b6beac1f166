//! Counter-based seed derivation.
//!
//! Every random draw in a sweep is keyed by `(master, tags...)`, so cells and
//! trials can be evaluated in any order or thread layout with identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold a list of counters into a child seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn stream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tags))
}

// Domain tags keep independent consumers of one seed apart.
pub(crate) const TAG_SCENE: u64 = 0x5343;
pub(crate) const TAG_PLAN: u64 = 0x504c;
pub(crate) const TAG_NOISE: u64 = 0x4e4f;
pub(crate) const TAG_RANGE_MASK: u64 = 0x524d;
pub(crate) const TAG_WAVEFORM: u64 = 0x5746;
pub(crate) const TAG_POWER: u64 = 0x5057;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn splitmix_reference_value() {
        // First output of the reference splitmix64 generator seeded with 0.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn derived_streams_differ_by_tag() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_ne!(derive_seed(1, &[2]), derive_seed(2, &[2]));
        let a: u64 = stream(9, &[3, 4]).random();
        let b: u64 = stream(9, &[3, 4]).random();
        assert_eq!(a, b);
    }
}
