use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `(n)_m = n (n-1) ... (n-m+1)`; zero when `m > n`.
pub fn falling_factorial(n: u64, m: u64) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    (n - m + 1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn factorial(n: u64) -> BigUint {
    falling_factorial(n, n)
}

/// `C(n, k)`; zero when `k > n`.
pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    // Each prefix product divided by i! is itself a binomial, so the
    // division is exact at every step.
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `n! / (k_1! ... k_s!)`; zero when a part is negative or the parts do not
/// sum to `n`.
pub fn multinomial(n: u64, parts: &[i64]) -> BigUint {
    if parts.iter().any(|&k| k < 0) || parts.iter().sum::<i64>() != n as i64 {
        return BigUint::zero();
    }
    let mut rest = n;
    let mut acc = BigUint::one();
    for &k in parts {
        acc *= binom(rest, k as u64);
        rest -= k as u64;
    }
    acc
}

/// `C(x, 2)` for small integers.
#[inline]
pub fn pairs(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}

/// Natural log of a big natural; `-inf` for zero.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("64 bits fit").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `a / b` as a float, through logs so that huge operands do not overflow.
pub fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    (ln_big(a) - ln_big(b)).exp()
}

/// `ln (n)_m` without big integers; `-inf` when `m > n`.
pub fn ln_falling(n: u64, m: u64) -> f64 {
    if m > n {
        return f64::NEG_INFINITY;
    }
    (n - m + 1..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln C(n, k)`.
pub fn ln_binom(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_falling(n, k) - ln_falling(k, k)
}

/// Compensated (Neumaier) running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
