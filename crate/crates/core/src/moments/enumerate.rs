//! Exhaustive map lists and a deterministic parallel sum over map pairs.

use num_bigint::BigUint;
use rayon::prelude::*;

use super::combinatorics::{binom, falling_factorial};
use crate::error::{Error, Result};
use crate::isosearch::{Injection, PartialInjection};

/// Limits for exhaustive pair sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Enumeration {
    /// Largest number of map pairs a call may visit.
    pub guard: u128,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration { guard: 10_000_000, workers: 0 }
    }
}

impl Enumeration {
    pub fn with_workers(workers: usize) -> Self {
        Enumeration { workers, ..Self::default() }
    }

    pub(crate) fn check(&self, maps: &BigUint) -> Result<()> {
        let required = maps * maps;
        if required > BigUint::from(self.guard) {
            return Err(Error::ScaleGuard {
                required: u128::try_from(&required).unwrap_or(u128::MAX),
                guard: self.guard,
            });
        }
        Ok(())
    }
}

/// `|I| = (n)_m`, total injections `[m] -> [n]`.
pub fn injection_count(n: usize, m: usize) -> BigUint {
    falling_factorial(n as u64, m as u64)
}

/// `|J| = C(n, m) (n)_m`, partial injections with an `m`-point domain.
pub fn partial_injection_count(n: usize, m: usize) -> BigUint {
    binom(n as u64, m as u64) * falling_factorial(n as u64, m as u64)
}

fn arrangements(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, m: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, m, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    if m <= n {
        rec(n, m, &mut Vec::with_capacity(m), &mut vec![false; n], &mut out);
    }
    out
}

fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// All injections `[m] -> [n]` in lexicographic order of images.
pub fn all_injections(n: usize, m: usize) -> Vec<Injection> {
    arrangements(n, m).into_iter().map(|image| Injection::new(n, image).expect("arrangement is injective")).collect()
}

/// All partial injections of `[n]` with an `m`-point domain.
pub fn all_partial_injections(n: usize, m: usize) -> Vec<PartialInjection> {
    let images = arrangements(n, m);
    subsets(n, m)
        .into_iter()
        .flat_map(|domain| {
            images
                .iter()
                .map(move |image| PartialInjection::new(n, domain.clone(), image.clone()).expect("valid partial map"))
        })
        .collect()
}

/// Accumulator that can absorb another one; merge order is fixed, so any
/// floating-point state stays reproducible.
pub trait Merge: Send {
    fn merge(&mut self, other: Self);
}

/// Sums `visit(acc, f, g)` over all ordered pairs of `maps`. Work is split
/// by first map, one accumulator each, and merged in index order, so the
/// result does not depend on the number of workers.
pub(crate) fn pair_reduce<T, A, I, F>(maps: &[T], workers: usize, init: I, visit: F) -> Result<A>
where
    T: Sync,
    A: Merge,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &T, &T) + Sync,
{
    let run = || -> Vec<A> {
        maps.par_iter()
            .map(|f| {
                let mut acc = init();
                for g in maps {
                    visit(&mut acc, f, g);
                }
                acc
            })
            .collect()
    };
    let rows = if workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run)
    };
    let mut total = init();
    for row in rows {
        total.merge(row);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_sizes_match_counts() {
        for n in 0..6 {
            for m in 0..=n {
                assert_eq!(BigUint::from(all_injections(n, m).len()), injection_count(n, m));
                assert_eq!(BigUint::from(all_partial_injections(n, m).len()), partial_injection_count(n, m));
            }
        }
        assert_eq!(partial_injection_count(3, 2), BigUint::from(18u32));
    }

    #[test]
    fn guard_trips() {
        let e = Enumeration { guard: 100, workers: 1 };
        assert!(e.check(&BigUint::from(10u32)).is_ok());
        assert!(matches!(e.check(&BigUint::from(11u32)), Err(Error::ScaleGuard { required: 121, guard: 100 })));
    }
}
