//! First moments and the sizes of the overlap classes of map pairs.

use num_bigint::BigUint;
use num_traits::Zero;

use super::combinatorics::{binom, factorial, falling_factorial, ln_binom, ln_falling, multinomial, pairs};
use crate::params::ModelParams;

/// `ln E N` for embeddings of `G(m, p)` into `G(n, 1/2)`: `ln (n)_m - C(m,2) ln 2`.
pub fn ln_expected_embeddings(n: usize, m: usize) -> f64 {
    ln_falling(n as u64, m as u64) - pairs(m) as f64 * std::f64::consts::LN_2
}

/// `E N = (n)_m 2^{-C(m,2)}`, the same for every `p`.
pub fn expected_embeddings(n: usize, m: usize) -> f64 {
    ln_expected_embeddings(n, m).exp()
}

/// `ln E N` for `m`-isomorphisms: `ln C(n,m) + ln (n)_m + C(m,2) ln tau`.
pub fn ln_expected_common(n: usize, m: usize, params: &ModelParams) -> f64 {
    ln_binom(n as u64, m as u64) + ln_falling(n as u64, m as u64) + pairs(m) as f64 * params.tau.ln()
}

pub fn expected_common(n: usize, m: usize, params: &ModelParams) -> f64 {
    ln_expected_common(n, m, params).exp()
}

fn diff(a: usize, b: usize) -> Option<u64> {
    a.checked_sub(b).map(|x| x as u64)
}

/// `|H_r|`: pairs of total injections `[m] -> [n]` whose ranges share `r`
/// points. `(n)_m C(m,r) (m)_r (n-m)_{m-r}`.
pub fn count_h_r(n: usize, m: usize, r: usize) -> BigUint {
    let (Some(nm), Some(mr)) = (diff(n, m), diff(m, r)) else {
        return BigUint::zero();
    };
    let (n, m, r) = (n as u64, m as u64, r as u64);
    falling_factorial(n, m) * binom(m, r) * falling_factorial(m, r) * falling_factorial(nm, mr)
}

/// Upper bound on the pairs in `H_r` that agree pointwise on at least
/// `ell` points: `(n)_m multinomial(m; ell, r-ell, m-r) (m-ell)_{r-ell} (n-m)_{m-r}`.
pub fn bound_h_r_ell(n: usize, m: usize, r: usize, ell: usize) -> BigUint {
    let (Some(nm), Some(mr), Some(rl), Some(ml)) = (diff(n, m), diff(m, r), diff(r, ell), diff(m, ell)) else {
        return BigUint::zero();
    };
    let parts = [ell as i64, rl as i64, mr as i64];
    falling_factorial(n as u64, m as u64)
        * multinomial(m as u64, &parts)
        * falling_factorial(ml, rl)
        * falling_factorial(nm, mr)
}

/// `|H_{d,r}|`: pairs of partial injections with `|Df ∩ Dg| = d` and
/// `|Rf ∩ Rg| = r`.
pub fn count_h_dr(n: usize, m: usize, d: usize, r: usize) -> BigUint {
    if d > m || r > m || m > n {
        return BigUint::zero();
    }
    let (n_, m_, d_, r_) = (n as i64, m as i64, d as i64, r as i64);
    let side = |k: i64| multinomial(n as u64, &[m_ - k, m_ - k, k, n_ - 2 * m_ + k]);
    let mf = factorial(m as u64);
    side(d_) * side(r_) * &mf * &mf
}

/// Bound on pairs in `H_{d,r}` agreeing on at least `ell` points:
/// `ceil(|H_{d,r}| C(min(d,r), ell) / (m)_ell)`.
pub fn bound_h_drl(n: usize, m: usize, d: usize, r: usize, ell: usize) -> BigUint {
    let den = falling_factorial(m as u64, ell as u64);
    if den.is_zero() {
        return BigUint::zero();
    }
    let num = count_h_dr(n, m, d, r) * binom(d.min(r) as u64, ell as u64);
    (num + &den - 1u32) / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn first_moment_examples() {
        assert!((expected_embeddings(4, 2) - 6.0).abs() < 1e-12);
        assert!((expected_embeddings(9, 0) - 1.0).abs() < 1e-12);
        assert!((expected_embeddings(3, 2) - 3.0).abs() < 1e-12);
        let half = ModelParams::new(0.5, 0.5).unwrap();
        assert!((expected_common(3, 2, &half) - 9.0).abs() < 1e-12);
        assert!((expected_common(7, 1, &ModelParams::new(0.2, 0.9).unwrap()) - 49.0).abs() < 1e-10);
        let mp = ModelParams::new(0.3, 0.6).unwrap();
        assert!((expected_common(3, 2, &mp) - 18.0 * 0.46).abs() < 1e-12);
    }

    #[test]
    fn exact_rational_agreement() {
        // With tau = 1/2 the first moment is a dyadic rational.
        let half = ModelParams::new(0.5, 0.5).unwrap();
        for n in 1..40usize {
            for m in 0..=n.min(12) {
                let num = binom(n as u64, m as u64) * falling_factorial(n as u64, m as u64);
                let exact = super::super::combinatorics::ratio(&num, &(big(1) << pairs(m)));
                let got = expected_common(n, m, &half);
                assert!((got - exact).abs() <= 1e-12 * exact, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn class_sizes() {
        assert_eq!(count_h_r(3, 2, 1), big(24));
        assert_eq!(count_h_r(3, 2, 2), big(12));
        assert_eq!(count_h_r(3, 2, 0), big(0));
        let total: BigUint = (0..=2).map(|r| count_h_r(3, 2, r)).sum();
        assert_eq!(total, big(36));
        assert_eq!(bound_h_r_ell(3, 2, 2, 2), big(6));
        for r in 0..=3 {
            assert_eq!(bound_h_r_ell(6, 3, r, 0), count_h_r(6, 3, r));
        }
        assert_eq!(count_h_dr(3, 2, 2, 2), big(36));
        assert_eq!(count_h_dr(4, 2, 0, 0), big(144));
        let total: BigUint = (0..=2).flat_map(|d| (0..=2).map(move |r| count_h_dr(3, 2, d, r))).sum();
        assert_eq!(total, big(324));
        assert_eq!(bound_h_drl(3, 2, 2, 2, 2), big(18));
        assert_eq!(bound_h_drl(5, 3, 2, 1, 0), count_h_dr(5, 3, 2, 1));
    }
}
