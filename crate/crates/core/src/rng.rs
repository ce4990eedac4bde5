//! Seed handling shared by the samplers and the Monte Carlo harness.
//!
//! A 64-bit seed is expanded into xoshiro256** state by four consecutive
//! splitmix64 outputs. Uniform reals use the top 53 bits of one generator
//! output, so `u < p` is exact for `p = 0` and `p = 1`.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256StarStar};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One splitmix64 step applied to `state`: increment by the golden gamma,
/// then the standard finalizer.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one seed, `h <- splitmix64(h ^ w)`.
pub fn fold_seed(master: u64, words: &[u64]) -> u64 {
    words.iter().fold(splitmix64(master), |h, &w| splitmix64(h ^ w))
}

pub fn stream(seed: u64) -> Xoshiro256StarStar {
    let mut expander = SplitMix64::from_seed(seed.to_le_bytes());
    let mut state = [0u8; 32];
    for chunk in state.chunks_exact_mut(8) {
        chunk.copy_from_slice(&expander.next_u64().to_le_bytes());
    }
    Xoshiro256StarStar::from_seed(state)
}

#[inline]
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `0..bound` by rejection on the top bits.
pub fn below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound) - 1;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// Fisher-Yates prefix: the first `k` entries of a uniformly random
/// permutation of `0..n`.
pub fn sample_distinct(rng: &mut impl RngCore, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + below(rng, (n - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_vector() {
        // First output of the reference splitmix64 generator seeded with 0.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        let mut sm = SplitMix64::from_seed(0u64.to_le_bytes());
        assert_eq!(sm.next_u64(), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn xoshiro_reference_vector() {
        let mut state = [0u8; 32];
        for (i, w) in [1u64, 2, 3, 4].iter().enumerate() {
            state[i * 8..i * 8 + 8].copy_from_slice(&w.to_le_bytes());
        }
        let mut rng = Xoshiro256StarStar::from_seed(state);
        assert_eq!(rng.next_u64(), 11520);
    }

    #[test]
    fn uniform_is_in_unit_interval() {
        let mut rng = stream(3);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn distinct_sample_has_no_repeats() {
        let mut rng = stream(11);
        for k in 0..=9 {
            let mut s = sample_distinct(&mut rng, 9, k);
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), k);
        }
    }
}
