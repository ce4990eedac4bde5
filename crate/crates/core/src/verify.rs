//! Property suites behind the `verify` command: component laws of the
//! edge graph on random map pairs, class cardinalities by enumeration,
//! threshold constants, and the Rado constructions.

use std::collections::BTreeSet;
use std::str::FromStr;

use num_bigint::BigUint;
use rand_xoshiro::rand_core::RngCore;
use serde::Serialize;

use crate::edgegraph::{build_common_edge_graph, build_embedding_edge_graph, classify_components, ComponentProfile};
use crate::error::{Error, Result};
use crate::isosearch::{Injection, PartialInjection};
use crate::moments::combinatorics::pairs;
use crate::moments::enumerate::{all_injections, all_partial_injections, pair_reduce, Merge};
use crate::moments::{bound_h_drl, bound_h_r_ell, count_h_dr, count_h_r};
use crate::params::ModelParams;
use crate::rado::{ackermann_decode, ackermann_encode, bit_adjacent, extension_witness, Hfs};
use crate::rng::{below, sample_distinct, stream};
use crate::thresholds::{m_star, m_star_approx, region_corner, w_eval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Edgegraph,
    Cardinality,
    Thresholds,
    Rado,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Edgegraph, Suite::Cardinality, Suite::Thresholds, Suite::Rado];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgegraph" => Ok(Suite::Edgegraph),
            "cardinality" => Ok(Suite::Cardinality),
            "thresholds" => Ok(Suite::Thresholds),
            "rado" => Ok(Suite::Rado),
            other => Err(Error::Parameter(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Random cases per randomized check.
    pub pairs: u64,
    pub seed: u64,
    /// Worker threads for enumeration; 0 uses every core.
    pub workers: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { pairs: 10_000, seed: 0, workers: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckTally>,
    /// The first few failing cases, for diagnosis.
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport { suite, checks: Vec::new(), failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.violations == 0)
    }

    pub fn total_checked(&self) -> u64 {
        self.checks.iter().map(|c| c.checked).sum()
    }

    pub fn total_violations(&self) -> u64 {
        self.checks.iter().map(|c| c.violations).sum()
    }

    fn record(&mut self, name: &str, ok: bool, context: impl FnOnce() -> String) {
        let idx = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(CheckTally { name: name.to_owned(), checked: 0, violations: 0 });
                self.checks.len() - 1
            }
        };
        self.checks[idx].checked += 1;
        if !ok {
            self.checks[idx].violations += 1;
            if self.failures.len() < 10 {
                self.failures.push(format!("{name}: {}", context()));
            }
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    match suite {
        Suite::Edgegraph => Ok(edgegraph_suite(opts)),
        Suite::Cardinality => cardinality_suite(opts),
        Suite::Thresholds => thresholds_suite(),
        Suite::Rado => rado_suite(opts),
    }
}

/// The component laws of an edge graph built from two total injections.
/// Each entry is `(law, holds)`.
pub fn total_laws(prof: &ComponentProfile) -> Vec<(&'static str, bool)> {
    let m2 = pairs(prof.m) as i64;
    let (r2, l2) = (pairs(prof.r) as i64, pairs(prof.ell) as i64);
    let sum =
        |f: &dyn Fn(usize, usize) -> i64| -> i64 { prof.census.iter().map(|(&(j, k), &c)| f(j, k) * c as i64).sum() };
    let rising = sum(&|j, k| (k == j + 1) as i64);
    let c11 = prof.c(1, 1) as i64;
    let long_even = sum(&|j, k| (j == k && j >= 2) as i64);
    vec![
        ("class-shape", prof.census.keys().all(|&(j, k)| k == j || k == j + 1)),
        ("component-count", sum(&|j, k| (k == j || k == j + 1) as i64) == prof.component_count() as i64),
        ("left-size", sum(&|j, _| j as i64) == m2 && prof.left_count as i64 == m2),
        ("right-size", sum(&|_, k| k as i64) == 2 * m2 - r2 && prof.right_count as i64 == 2 * m2 - r2),
        ("rising-count", rising == m2 - r2),
        ("single-edge-range", l2 <= c11 && 2 * c11 <= 2 * l2 + (prof.r - prof.ell) as i64),
        ("even-cycle-bound", 2 * long_even <= r2 - l2),
    ]
}

/// The component laws of an edge graph built from two partial injections.
pub fn partial_laws(prof: &ComponentProfile) -> Vec<(&'static str, bool)> {
    let m2 = pairs(prof.m) as i64;
    let (d2, r2, l2) = (pairs(prof.d) as i64, pairs(prof.r) as i64, pairs(prof.ell) as i64);
    let z = prof.zcal as i64;
    let sum =
        |f: &dyn Fn(usize, usize) -> i64| -> i64 { prof.census.iter().map(|(&(j, k), &c)| f(j, k) * c as i64).sum() };
    let paths: i64 = prof.paths_jj.values().map(|&c| c as i64).sum();
    let cycles_weighted: i64 = prof.cycles.iter().map(|(&j, &c)| j as i64 * c as i64).sum();
    let paths_weighted: i64 = prof.paths_jj.iter().map(|(&j, &c)| (j as i64 - 1) * c as i64).sum();
    let up = |j: usize, k: usize| k == j + 1;
    let down = |j: usize, k: usize| j == k + 1;
    let long_cycles: i64 = prof.cycles.iter().filter(|(&j, _)| j >= 2).map(|(_, &c)| c as i64).sum();
    // Every class, C_{j+1,j} included, is weighted by its left count minus one.
    let left_excess = sum(&|j, _| j as i64 - 1);
    vec![
        ("partial-class-shape", prof.census.keys().all(|&(j, k)| j.abs_diff(k) <= 1)),
        ("no-irregular", prof.irregular == 0 && prof.cycles(1) == 0),
        ("left", sum(&|j, _| j as i64) == 2 * m2 - d2 && prof.left_count as i64 == 2 * m2 - d2),
        ("right", sum(&|_, k| k as i64) == 2 * m2 - r2 && prof.right_count as i64 == 2 * m2 - r2),
        (
            "left1",
            prof.left_deg1 as i64 == paths + 2 * sum(&|j, k| down(j, k) as i64)
                && prof.left_deg1 as i64 == z + 2 * m2 - 2 * d2,
        ),
        (
            "right1",
            prof.right_deg1 as i64 == paths + 2 * sum(&|j, k| up(j, k) as i64)
                && prof.right_deg1 as i64 == z + 2 * m2 - 2 * r2,
        ),
        ("rising-minus-falling", sum(&|j, k| up(j, k) as i64 - down(j, k) as i64) == d2 - r2),
        (
            "right-excess",
            paths_weighted
                + cycles_weighted
                + sum(&|j, k| {
                    if up(j, k) {
                        j as i64 - 1
                    } else if down(j, k) {
                        k as i64
                    } else {
                        0
                    }
                })
                == r2 - z,
        ),
        ("long-cycle-bound", 2 * long_cycles <= r2 - z),
        ("left-excess-bound", 2 * left_excess >= r2 - z),
        ("agreement-range", l2 <= z && 2 * z <= 2 * l2 + (prof.r - prof.ell) as i64),
    ]
}

fn random_injection(rng: &mut impl RngCore, n: usize, m: usize) -> Vec<usize> {
    sample_distinct(rng, n, m)
}

/// A second image close to `image`: a few swaps and replacements, so that
/// overlaps of every size show up.
fn perturb_image(rng: &mut impl RngCore, n: usize, image: &[usize]) -> Vec<usize> {
    let mut g = image.to_vec();
    let m = g.len();
    for _ in 0..below(rng, 4) {
        if m >= 2 && below(rng, 2) == 0 {
            let a = below(rng, m as u64) as usize;
            let b = below(rng, m as u64) as usize;
            g.swap(a, b);
        } else if n > m && m > 0 {
            let unused: Vec<usize> = (0..n).filter(|v| !g.contains(v)).collect();
            let i = below(rng, m as u64) as usize;
            g[i] = unused[below(rng, unused.len() as u64) as usize];
        }
    }
    g
}

pub fn random_total_pair(rng: &mut impl RngCore, n: usize, m: usize) -> (Injection, Injection) {
    let f = random_injection(rng, n, m);
    let g = if below(rng, 3) == 0 { random_injection(rng, n, m) } else { perturb_image(rng, n, &f) };
    (Injection::new(n, f).expect("distinct"), Injection::new(n, g).expect("distinct"))
}

pub fn random_partial_pair(rng: &mut impl RngCore, n: usize, m: usize) -> (PartialInjection, PartialInjection) {
    let fd = sample_distinct(rng, n, m);
    let fi = sample_distinct(rng, n, m);
    let (gd, gi) = if below(rng, 3) == 0 {
        (sample_distinct(rng, n, m), sample_distinct(rng, n, m))
    } else {
        (perturb_image(rng, n, &fd), perturb_image(rng, n, &fi))
    };
    let f = PartialInjection::from_pairs(n, n, fd.into_iter().zip(fi).collect()).expect("distinct");
    let g = PartialInjection::from_pairs(n, n, gd.into_iter().zip(gi).collect()).expect("distinct");
    (f, g)
}

/// Random `(n, m)` with `m <= 6`, `m <= n <= 14`, `n >= 1`.
pub fn random_shape(rng: &mut impl RngCore) -> (usize, usize) {
    let m = below(rng, 7) as usize;
    let n = m.max(1) + below(rng, (15 - m.max(1)) as u64) as usize;
    (n, m)
}

fn edgegraph_suite(opts: &VerifyOptions) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Edgegraph);
    let mut rng = stream(opts.seed);
    for i in 0..opts.pairs {
        let (n, m) = random_shape(&mut rng);
        if i % 2 == 0 {
            let (f, g) = random_total_pair(&mut rng, n, m);
            let prof = classify_components(&build_embedding_edge_graph(&f, &g).expect("same shape"))
                .expect("well-formed edge graph");
            for (law, ok) in total_laws(&prof) {
                report.record(law, ok, || format!("f={:?} g={:?} n={n}", f.image(), g.image()));
            }
        } else {
            let (f, g) = random_partial_pair(&mut rng, n, m);
            let prof = classify_components(&build_common_edge_graph(&f, &g).expect("same shape"))
                .expect("well-formed edge graph");
            for (law, ok) in partial_laws(&prof) {
                report.record(law, ok, || {
                    format!("f={:?} g={:?} n={n}", f.pairs().collect::<Vec<_>>(), g.pairs().collect::<Vec<_>>())
                });
            }
        }
    }
    report
}

/// Counts indexed by `(a, b, ell)`; `a` and `b` are overlap sizes.
#[derive(Clone)]
struct Counts {
    side: usize,
    cells: Vec<u64>,
}

impl Counts {
    fn new(side: usize) -> Self {
        Counts { side, cells: vec![0; side * side * side] }
    }

    fn bump(&mut self, a: usize, b: usize, ell: usize) {
        self.cells[(a * self.side + b) * self.side + ell] += 1;
    }

    fn get(&self, a: usize, b: usize, ell: usize) -> u64 {
        self.cells[(a * self.side + b) * self.side + ell]
    }
}

impl Merge for Counts {
    fn merge(&mut self, other: Self) {
        for (a, b) in self.cells.iter_mut().zip(other.cells) {
            *a += b;
        }
    }
}

fn overlap(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.contains(x)).count()
}

fn cardinality_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Cardinality);
    for n in 1..=6 {
        for m in 0..=n.min(4) {
            let maps = all_injections(n, m);
            let counts = pair_reduce(
                &maps,
                opts.workers,
                || Counts::new(m + 1),
                |acc, f, g| {
                    let ell = (0..m).filter(|&u| f.apply(u) == g.apply(u)).count();
                    acc.bump(0, overlap(f.image(), g.image()), ell);
                },
            )?;
            for r in 0..=m {
                let exact: u64 = (0..=m).map(|l| counts.get(0, r, l)).sum();
                report.record("count-h-r", BigUint::from(exact) == count_h_r(n, m, r), || format!("n={n} m={m} r={r}"));
                for ell in 0..=r {
                    let at_least: u64 = (ell..=m).map(|l| counts.get(0, r, l)).sum();
                    let bound = bound_h_r_ell(n, m, r, ell);
                    let ok = if ell == 0 { bound == BigUint::from(at_least) } else { bound >= BigUint::from(at_least) };
                    report.record("bound-h-r-ell", ok, || format!("n={n} m={m} r={r} ell={ell}"));
                }
            }
        }
        for m in 0..=n.min(3) {
            let maps = all_partial_injections(n, m);
            let counts = pair_reduce(
                &maps,
                opts.workers,
                || Counts::new(m + 1),
                |acc, f, g| {
                    let common: Vec<usize> = f.domain().iter().copied().filter(|&u| g.get(u).is_some()).collect();
                    let ell = common.iter().filter(|&&u| f.get(u) == g.get(u)).count();
                    acc.bump(common.len(), overlap(f.image(), g.image()), ell);
                },
            )?;
            for d in 0..=m {
                for r in 0..=m {
                    let exact: u64 = (0..=m).map(|l| counts.get(d, r, l)).sum();
                    report.record("count-h-dr", BigUint::from(exact) == count_h_dr(n, m, d, r), || {
                        format!("n={n} m={m} d={d} r={r}")
                    });
                    for ell in 0..=d.min(r) {
                        let at_least: u64 = (ell..=m).map(|l| counts.get(d, r, l)).sum();
                        let bound = bound_h_drl(n, m, d, r, ell);
                        let ok =
                            if ell == 0 { bound == BigUint::from(at_least) } else { bound >= BigUint::from(at_least) };
                        report.record("bound-h-dr-ell", ok, || format!("n={n} m={m} d={d} r={r} ell={ell}"));
                    }
                }
            }
        }
    }
    Ok(report)
}

fn thresholds_suite() -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Thresholds);
    let (p, q) = region_corner();
    report
        .record("corner", (p - 0.1464466094).abs() < 1e-8 && (q - 0.8535533906).abs() < 1e-8, || format!("({p}, {q})"));
    let corner = ModelParams::new(p, q)?;
    report.record("lambda-corner", (corner.lambda - 0.7213475205).abs() < 1e-8, || corner.lambda.to_string());
    report.record("gamma-corner", (corner.gamma - 0.5).abs() < 1e-8, || corner.gamma.to_string());
    let half = ModelParams::new(0.5, 0.5)?;
    let w1 = w_eval(1.0, half.lambda, 0)?;
    report.record("W(1)", w1 == 1.0 + half.lambda * (2.0 * std::f64::consts::PI).ln(), || w1.to_string());
    for n in [1e2, 1e3, 1e6, 1e9] {
        let ms = m_star(n, &half, 1e-10)?;
        report.record("m_star-residual", ms.residual <= 1e-10, || format!("n={n} residual={}", ms.residual));
    }
    let mut gaps = Vec::new();
    for n in [1e3, 1e6, 1e9] {
        gaps.push((m_star(n, &half, 1e-10)?.m_star - m_star_approx(n, &half)?).abs());
    }
    report.record("approx-decreasing", gaps[0] > gaps[1] && gaps[1] > gaps[2], || format!("{gaps:?}"));
    report.record("approx-below-one", gaps.iter().all(|&g| g < 1.0), || format!("{gaps:?}"));
    Ok(report)
}

/// Random hereditarily finite set of depth at most `depth`.
pub fn random_hfs(rng: &mut impl RngCore, depth: usize) -> Hfs {
    if depth == 0 {
        return Hfs::empty();
    }
    let size = below(rng, 4) as usize;
    Hfs::new(
        (0..size)
            .map(|_| {
                let d = below(rng, depth as u64) as usize;
                random_hfs(rng, d)
            })
            .collect(),
    )
}

fn rado_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Rado);
    for k in 0u64..1 << 16 {
        let n = BigUint::from(k);
        let back = ackermann_encode(&ackermann_decode(&n))?;
        report.record("decode-encode", back == n, || k.to_string());
    }
    let mut rng = stream(opts.seed);
    let cases = opts.pairs.min(1000);
    for _ in 0..cases {
        let s = random_hfs(&mut rng, 4);
        let code = ackermann_encode(&s)?;
        report.record("encode-decode", ackermann_decode(&code) == s, || s.to_string());
    }
    for _ in 0..cases {
        let us: BTreeSet<u64> = (0..below(&mut rng, 6)).map(|_| below(&mut rng, 31)).collect();
        let vs: BTreeSet<u64> =
            (0..below(&mut rng, 6)).map(|_| below(&mut rng, 31)).filter(|v| !us.contains(v)).collect();
        let z = extension_witness(&us, &vs)?;
        let ok = us.iter().all(|&u| bit_adjacent(&z, &BigUint::from(u)).unwrap_or(false))
            && vs.iter().all(|&v| !bit_adjacent(&z, &BigUint::from(v)).unwrap_or(true))
            && us.iter().chain(&vs).all(|&x| z > BigUint::from(x));
        report.record("extension-witness", ok, || format!("U={us:?} V={vs:?}"));
    }
    let mut done = 0;
    while done < cases {
        let a = random_hfs(&mut rng, 4);
        let b = if below(&mut rng, 3) == 0 && !a.is_empty() {
            // Bias towards related pairs so that membership actually occurs.
            a.members()[below(&mut rng, a.len() as u64) as usize].clone()
        } else {
            random_hfs(&mut rng, 4)
        };
        if a == b {
            continue;
        }
        let member = a.contains(&b) || b.contains(&a);
        let adjacent = bit_adjacent(&ackermann_encode(&a)?, &ackermann_encode(&b)?)?;
        report.record("edge-preservation", member == adjacent, || format!("{a} vs {b}"));
        done += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgegraph_suite_small() {
        let report = run_suite(Suite::Edgegraph, &VerifyOptions { pairs: 2000, seed: 7, workers: 1 }).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.checks.iter().any(|c| c.name == "left-excess-bound"));
    }

    #[test]
    fn thresholds_suite_passes() {
        assert!(run_suite(Suite::Thresholds, &VerifyOptions::default()).unwrap().passed());
    }

    #[test]
    fn laws_catch_a_broken_profile() {
        let f = Injection::new(5, vec![0, 1, 2]).unwrap();
        let mut prof = classify_components(&build_embedding_edge_graph(&f, &f).unwrap()).unwrap();
        prof.census.insert((1, 3), 1);
        assert!(total_laws(&prof).iter().any(|(_, ok)| !ok));
    }

    #[test]
    fn suite_names() {
        assert_eq!("rado".parse::<Suite>().unwrap(), Suite::Rado);
        assert!("nope".parse::<Suite>().is_err());
    }
}
