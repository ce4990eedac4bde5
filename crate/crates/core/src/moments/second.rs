//! Second moments by summing pair moments over all map pairs, and the
//! finite-`n` bounds built on top of them.

use std::collections::BTreeMap;

use serde::Serialize;

use super::cardinality::{count_h_dr, count_h_r};
use super::combinatorics::{falling_factorial, ln_big, ln_falling, pairs, ratio, Neumaier};
use super::enumerate::{
    all_injections, all_partial_injections, injection_count, pair_reduce, partial_injection_count, Enumeration, Merge,
};
use crate::edgegraph::{build_common_edge_graph, build_embedding_edge_graph, classify_components, ComponentProfile};
use crate::error::{Error, Result};
use crate::params::{ModelParams, Problem};

impl Merge for Neumaier {
    fn merge(&mut self, other: Self) {
        Neumaier::merge(self, &other);
    }
}

impl Merge for u64 {
    fn merge(&mut self, other: Self) {
        *self += other;
    }
}

impl<T: Merge> Merge for Vec<T> {
    fn merge(&mut self, other: Self) {
        assert_eq!(self.len(), other.len(), "accumulators of different shape");
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

impl<A: Merge, B: Merge> Merge for (A, B) {
    fn merge(&mut self, other: Self) {
        self.0.merge(other.0);
        self.1.merge(other.1);
    }
}

/// Visits the component profile of every ordered pair of maps: total
/// injections `[m] -> [n]` for `Embed`, partial injections with an
/// `m`-point domain for `Common`.
pub fn fold_pair_profiles<A, I, F>(
    n: usize,
    m: usize,
    problem: Problem,
    enumeration: &Enumeration,
    init: I,
    visit: F,
) -> Result<A>
where
    A: Merge,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &ComponentProfile) + Sync,
{
    if m > n {
        return Err(Error::Size(format!("m = {m} exceeds n = {n}")));
    }
    match problem {
        Problem::Embed => {
            enumeration.check(&injection_count(n, m))?;
            let maps = all_injections(n, m);
            pair_reduce(&maps, enumeration.workers, init, |acc, f, g| {
                let t = build_embedding_edge_graph(f, g).expect("maps share a shape");
                visit(acc, &classify_components(&t).expect("constructed edge graph"));
            })
        }
        Problem::Common => {
            enumeration.check(&partial_injection_count(n, m))?;
            let maps = all_partial_injections(n, m);
            pair_reduce(&maps, enumeration.workers, init, |acc, f, g| {
                let t = build_common_edge_graph(f, g).expect("maps share a shape");
                visit(acc, &classify_components(&t).expect("constructed edge graph"));
            })
        }
    }
}

/// `ln E J_f`, the same for every map: each of the `C(m,2)` pairs agrees
/// with probability `tau` (or 1/2 against the embedding host).
fn ln_single(m: usize, params: &ModelParams, problem: Problem) -> f64 {
    let agree = match problem {
        Problem::Embed => 0.5f64,
        Problem::Common => params.tau,
    };
    pairs(m) as f64 * agree.ln()
}

fn map_count(n: usize, m: usize, problem: Problem) -> num_bigint::BigUint {
    match problem {
        Problem::Embed => injection_count(n, m),
        Problem::Common => partial_injection_count(n, m),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondMoment {
    pub problem: Problem,
    pub n: usize,
    pub m: usize,
    /// Number of map pairs visited.
    pub pairs: u128,
    pub first: f64,
    pub ln_first: f64,
    pub second: f64,
    pub ln_second: f64,
    /// `E N^2 / (E N)^2`.
    pub ratio: f64,
}

/// `E N^2 = Σ_{f,g} E[J_f J_g]` with every pair moment taken from the
/// component census of the pair's edge graph.
pub fn second_moment_exact(
    n: usize,
    m: usize,
    params: &ModelParams,
    problem: Problem,
    enumeration: &Enumeration,
) -> Result<SecondMoment> {
    let single = ln_single(m, params, problem);
    let (second, normalized) = fold_pair_profiles(
        n,
        m,
        problem,
        enumeration,
        || (Neumaier::default(), Neumaier::default()),
        |acc, prof| {
            let ln_pm = prof.ln_pair_moment(params, problem);
            acc.0.add(ln_pm.exp());
            acc.1.add((ln_pm - 2.0 * single).exp());
        },
    )?;
    let count = map_count(n, m, problem);
    let ln_count = ln_big(&count);
    let ln_first = ln_count + single;
    let second = second.value();
    Ok(SecondMoment {
        problem,
        n,
        m,
        pairs: u128::try_from(&count * &count).unwrap_or(u128::MAX),
        first: ln_first.exp(),
        ln_first,
        second,
        ln_second: second.ln(),
        ratio: normalized.value() / (2.0 * ln_count).exp(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    /// Enumerate every pair.
    Exact,
    /// Closed-form majorant from class sizes only.
    Relaxed,
}

/// The upper bound `S` on the embedding ratio and its split at `r <= cm`,
/// or the `r <= d` half of the `T_{d,r}` bounds for the common problem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentBounds {
    pub c: f64,
    pub mode: BoundMode,
    pub s_total: f64,
    pub s_one: f64,
    pub s_two: f64,
    /// Contribution of each range overlap `r` to `S` (embedding only).
    pub per_r: Vec<f64>,
    /// Pairs whose exponent `C(m,2) - |C(f,g)|` came out negative.
    pub exponent_violations: u64,
    /// `(d, r) -> bound1` (common only).
    #[serde(serialize_with = "serialize_pair_map")]
    pub t_dr: BTreeMap<(usize, usize), f64>,
    /// `(1 + m beta^{(cm-2)/2})^m` (common only).
    pub psi_m: Option<f64>,
}

fn serialize_pair_map<S: serde::Serializer>(
    map: &BTreeMap<(usize, usize), f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(map.len()))?;
    for (&(d, r), &v) in map {
        seq.serialize_element(&serde_json::json!({ "d": d, "r": r, "value": v }))?;
    }
    seq.end()
}

fn check_split(c: f64, low: f64) -> Result<()> {
    if c > low && c < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("split constant c = {c} must lie in ({low}, 1)")))
    }
}

/// `S = (n)_m^{-2} Σ_r 2^{C(r,2)} Σ_{H_r} phat^{C(m,2) - |C(f,g)|}`, which
/// dominates `E N^2 / (E N)^2` for the embedding problem.
pub fn s_bound(n: usize, m: usize, p: f64, c: f64, mode: BoundMode, enumeration: &Enumeration) -> Result<MomentBounds> {
    check_split(c, 0.5)?;
    let params = ModelParams::embedding(p)?;
    if m > n {
        return Err(Error::Size(format!("m = {m} exceeds n = {n}")));
    }
    let ln_count = ln_falling(n as u64, m as u64);
    let weight = |r: usize| (pairs(r) as f64 * std::f64::consts::LN_2 - 2.0 * ln_count).exp();
    let (per_r, violations) = match mode {
        BoundMode::Exact => {
            let ln_phat = params.phat.ln();
            let total_pairs = pairs(m) as i64;
            let (sums, violations) = fold_pair_profiles(
                n,
                m,
                Problem::Embed,
                enumeration,
                || (vec![Neumaier::default(); m + 1], 0u64),
                |acc, prof| {
                    let exponent = total_pairs - prof.component_count() as i64;
                    if exponent < 0 {
                        acc.1 += 1;
                    }
                    acc.0[prof.r].add((exponent as f64 * ln_phat).exp());
                },
            )?;
            let per_r: Vec<f64> = sums.iter().enumerate().map(|(r, s)| weight(r) * s.value()).collect();
            (per_r, violations)
        }
        BoundMode::Relaxed => {
            // Every pair in H_0 has C(m,2) singleton components, so that
            // class contributes at most 1; the rest use |C| >= 0.
            let mut per_r = vec![1.0];
            per_r.extend((1..=m).map(|r| {
                (pairs(r) as f64 * std::f64::consts::LN_2 + ln_big(&count_h_r(n, m, r)) - 2.0 * ln_count).exp()
            }));
            (per_r, 0)
        }
    };
    let cut = c * m as f64;
    let mut one = Neumaier::default();
    let mut two = Neumaier::default();
    for (r, &v) in per_r.iter().enumerate() {
        if r as f64 <= cut {
            one.add(v);
        } else {
            two.add(v);
        }
    }
    Ok(MomentBounds {
        c,
        mode,
        s_total: one.value() + two.value(),
        s_one: one.value(),
        s_two: two.value(),
        per_r,
        exponent_violations: violations,
        t_dr: BTreeMap::new(),
        psi_m: None,
    })
}

fn check_region(params: &ModelParams) -> Result<()> {
    if params.in_admissible_region() {
        Ok(())
    } else {
        Err(Error::Region { p: params.p, q: params.q })
    }
}

/// `ln` of the correlation bound
/// `(1/tau)^{(1-gamma) C(d,2) + gamma C(r,2)} beta^{(r-ell)(r-2)/2}`.
pub fn ln_correlation_bound(d: usize, r: usize, ell: usize, m: usize, params: &ModelParams) -> Result<f64> {
    check_region(params)?;
    if r > d {
        return Err(Error::Symmetry { d, r });
    }
    if d > m || ell > r {
        return Err(Error::Parameter(format!("need ell <= r <= d <= m, got ell={ell} r={r} d={d} m={m}")));
    }
    let base = -params.tau.ln() * ((1.0 - params.gamma) * pairs(d) as f64 + params.gamma * pairs(r) as f64);
    let beta_exp = (r as f64 - ell as f64) * (r as f64 - 2.0) / 2.0;
    let beta_term = if beta_exp == 0.0 { 0.0 } else { beta_exp * params.beta.ln() };
    Ok(base + beta_term)
}

/// Upper bound on `E[J_f J_g] / (E J_f E J_g)` for pairs with overlap
/// `(d, r, ell)` and `r <= d`. Swap the roles of the graphs (and use
/// [`ModelParams::mirrored`]) when `r > d`.
pub fn correlation_bound(d: usize, r: usize, ell: usize, m: usize, params: &ModelParams) -> Result<f64> {
    ln_correlation_bound(d, r, ell, m, params).map(f64::exp)
}

/// `(1 + m beta^{(cm-2)/2})^m`.
pub fn psi(m: usize, c: f64, params: &ModelParams) -> f64 {
    let m_f = m as f64;
    (1.0 + m_f * params.beta.powf((c * m_f - 2.0) / 2.0)).powf(m_f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TdrMode {
    Exact,
    Bound1,
    Bound2,
}

/// `T_{d,r}` for every `(d, r)`, by enumeration: the share of the ratio
/// `E N^2 / (E N)^2` carried by pairs in `H_{d,r}`.
pub fn t_dr_exact_table(
    n: usize,
    m: usize,
    params: &ModelParams,
    enumeration: &Enumeration,
) -> Result<BTreeMap<(usize, usize), f64>> {
    let single = ln_single(m, params, Problem::Common);
    let side = m + 1;
    let sums = fold_pair_profiles(
        n,
        m,
        Problem::Common,
        enumeration,
        || vec![Neumaier::default(); side * side],
        |acc, prof| {
            let ln_pm = prof.ln_pair_moment(params, Problem::Common);
            acc[prof.d * side + prof.r].add((ln_pm - 2.0 * single).exp());
        },
    )?;
    let ln_norm = 2.0 * ln_big(&partial_injection_count(n, m));
    Ok((0..side)
        .flat_map(|d| (0..side).map(move |r| (d, r)))
        .map(|(d, r)| ((d, r), sums[d * side + r].value() / ln_norm.exp()))
        .collect())
}

/// `|H_{d,r}| / |J|^2 (1/tau)^{(1-gamma) C(d,2) + gamma C(r,2)}`.
fn ln_bound1(n: usize, m: usize, params: &ModelParams, d: usize, r: usize) -> Result<f64> {
    check_region(params)?;
    if r > d {
        return Err(Error::Symmetry { d, r });
    }
    if d > m || m > n {
        return Err(Error::Parameter(format!("need r <= d <= m <= n, got d={d} m={m} n={n}")));
    }
    let share = ln_big(&count_h_dr(n, m, d, r)) - 2.0 * ln_big(&partial_injection_count(n, m));
    Ok(share - params.tau.ln() * ((1.0 - params.gamma) * pairs(d) as f64 + params.gamma * pairs(r) as f64))
}

/// One entry of `T_{d,r}` in the requested mode.
#[allow(clippy::too_many_arguments)]
pub fn t_dr(
    n: usize,
    m: usize,
    params: &ModelParams,
    d: usize,
    r: usize,
    mode: TdrMode,
    c: f64,
    enumeration: &Enumeration,
) -> Result<f64> {
    match mode {
        TdrMode::Exact => {
            if d > m || r > m {
                return Err(Error::Parameter(format!("d = {d}, r = {r} exceed m = {m}")));
            }
            Ok(t_dr_exact_table(n, m, params, enumeration)?[&(d, r)])
        }
        TdrMode::Bound1 => ln_bound1(n, m, params, d, r).map(f64::exp),
        TdrMode::Bound2 => {
            check_split(c, 0.0)?;
            if (r as f64) < c * m as f64 {
                return Err(Error::Parameter(format!("bound2 needs cm <= r, got c={c} m={m} r={r}")));
            }
            let ln1 = ln_bound1(n, m, params, d, r)?;
            let ln_falling_mr = ln_big(&falling_factorial(m as u64, r as u64));
            Ok((ln1 + psi(m, c, params).ln() - ln_falling_mr).exp())
        }
    }
}

/// Closed-form bounds for the common problem: `bound1` for every
/// `r <= d`, summed and split at `r <= cm`.
pub fn common_bounds(n: usize, m: usize, params: &ModelParams, c: f64) -> Result<MomentBounds> {
    check_split(c, 0.0)?;
    let mut t = BTreeMap::new();
    let (mut one, mut two) = (Neumaier::default(), Neumaier::default());
    for d in 0..=m {
        for r in 0..=d {
            let v = ln_bound1(n, m, params, d, r)?.exp();
            t.insert((d, r), v);
            if r as f64 <= c * m as f64 {
                one.add(v);
            } else {
                two.add(v);
            }
        }
    }
    Ok(MomentBounds {
        c,
        mode: BoundMode::Relaxed,
        s_total: one.value() + two.value(),
        s_one: one.value(),
        s_two: two.value(),
        per_r: Vec::new(),
        exponent_violations: 0,
        t_dr: t,
        psi_m: Some(psi(m, c, params)),
    })
}

/// The ratio `E N^2 / (E N)^2` for the common problem split into five
/// disjoint groups of `T_{d,r}` terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioDecomposition {
    pub c: f64,
    pub t00: f64,
    pub tmm: f64,
    /// `r <= d`, `r <= cm`, `(d,r) != (0,0)`.
    pub small_r: f64,
    /// `cm < r <= d`, `(d,r) != (m,m)`.
    pub large_r: f64,
    /// `d < r`, the mirror image of the previous groups.
    pub swapped: f64,
    pub total: f64,
    /// `|H_{m,0}| / |J|^2 (tau_{1,2} / tau^2)^{C(m,2)}`, one summand of the
    /// total and so a lower bound for it.
    pub lower_term: f64,
}

pub fn ratio_decomposition(
    n: usize,
    m: usize,
    params: &ModelParams,
    c: f64,
    enumeration: &Enumeration,
) -> Result<RatioDecomposition> {
    check_split(c, 0.0)?;
    let table = t_dr_exact_table(n, m, params, enumeration)?;
    let cut = c * m as f64;
    let mut groups = [Neumaier::default(); 5];
    for (&(d, r), &v) in &table {
        let slot = if (d, r) == (0, 0) {
            0
        } else if (d, r) == (m, m) {
            1
        } else if d < r {
            4
        } else if r as f64 <= cut {
            2
        } else {
            3
        };
        groups[slot].add(v);
    }
    let mut total = Neumaier::default();
    for g in &groups {
        total.merge(g);
    }
    let lower_term = ratio(&count_h_dr(n, m, m, 0), &(partial_injection_count(n, m).pow(2)))
        * (params.tau_jk(1, 2) / (params.tau * params.tau)).powi(pairs(m) as i32);
    Ok(RatioDecomposition {
        c,
        t00: groups[0].value(),
        tmm: groups[1].value(),
        small_r: groups[2].value(),
        large_r: groups[3].value(),
        swapped: groups[4].value(),
        total: total.value(),
        lower_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Enumeration {
        Enumeration::with_workers(2)
    }

    #[test]
    fn single_vertex_maps_are_uncorrelated() {
        let mp = ModelParams::new(0.3, 0.8).unwrap();
        for n in 1..5 {
            let sm = second_moment_exact(n, 1, &mp, Problem::Common, &small()).unwrap();
            let n4 = (n as f64).powi(4);
            assert!((sm.second - n4).abs() < 1e-9 * n4);
            assert!((sm.ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn worker_count_does_not_change_sums() {
        let mp = ModelParams::new(0.3, 0.6).unwrap();
        let a = second_moment_exact(4, 3, &mp, Problem::Common, &Enumeration::with_workers(1)).unwrap();
        let b = second_moment_exact(4, 3, &mp, Problem::Common, &Enumeration::with_workers(3)).unwrap();
        assert_eq!(a.second.to_bits(), b.second.to_bits());
        assert_eq!(a.ratio.to_bits(), b.ratio.to_bits());
    }

    #[test]
    fn guard_refuses_large_instances() {
        let e = Enumeration { guard: 1000, workers: 1 };
        let mp = ModelParams::new(0.5, 0.5).unwrap();
        assert!(matches!(
            second_moment_exact(5, 3, &mp, Problem::Common, &e),
            Err(Error::ScaleGuard { required: 360_000, guard: 1000 })
        ));
    }

    #[test]
    fn relaxed_s_at_three_two() {
        let s = s_bound(3, 2, 0.5, 0.75, BoundMode::Relaxed, &small()).unwrap();
        assert!((s.s_total - (1.0 + 48.0 / 36.0)).abs() < 1e-12);
        assert!((s.s_one + s.s_two - s.s_total).abs() < 1e-15);
        let exact = s_bound(3, 2, 0.5, 0.75, BoundMode::Exact, &small()).unwrap();
        assert!(exact.s_total <= s.s_total + 1e-12);
        assert_eq!(exact.exponent_violations, 0);
        assert!(matches!(s_bound(3, 2, 0.5, 0.4, BoundMode::Exact, &small()), Err(Error::Parameter(_))));
    }

    #[test]
    fn correlation_bound_examples() {
        let mp = ModelParams::new(0.5, 0.5).unwrap();
        assert_eq!(correlation_bound(0, 0, 0, 3, &mp).unwrap(), 1.0);
        let m = 4;
        let tight = correlation_bound(m, m, m, m, &mp).unwrap();
        assert!((tight - mp.tau.powi(-(pairs(m) as i32))).abs() < 1e-9);
        assert!(matches!(correlation_bound(1, 2, 0, 3, &mp), Err(Error::Symmetry { d: 1, r: 2 })));
        let outside = ModelParams::new(0.1, 0.9).unwrap();
        assert!(matches!(correlation_bound(2, 1, 0, 3, &outside), Err(Error::Region { .. })));
    }

    #[test]
    fn t00_is_independence() {
        let mp = ModelParams::new(0.5, 0.5).unwrap();
        let table = t_dr_exact_table(4, 2, &mp, &small()).unwrap();
        let share = ratio(&count_h_dr(4, 2, 0, 0), &partial_injection_count(4, 2).pow(2));
        assert!((table[&(0, 0)] - share).abs() < 1e-12);
    }

    #[test]
    fn decomposition_adds_up() {
        let mp = ModelParams::new(0.4, 0.6).unwrap();
        let dec = ratio_decomposition(4, 2, &mp, 0.75, &small()).unwrap();
        let sm = second_moment_exact(4, 2, &mp, Problem::Common, &small()).unwrap();
        assert!((dec.total - sm.ratio).abs() < 1e-9 * sm.ratio);
        let parts = dec.t00 + dec.tmm + dec.small_r + dec.large_r + dec.swapped;
        assert!((parts - dec.total).abs() < 1e-12);
        assert!(dec.total >= 1.0);

        let corner = ModelParams::new(0.1, 0.9).unwrap();
        let dec = ratio_decomposition(5, 2, &corner, 0.75, &small()).unwrap();
        let table = t_dr_exact_table(5, 2, &corner, &small()).unwrap();
        assert!((dec.lower_term - table[&(2, 0)]).abs() < 1e-12 * table[&(2, 0)]);
        assert!(dec.lower_term <= dec.total);
    }

    #[test]
    fn bound2_preconditions() {
        let mp = ModelParams::new(0.5, 0.5).unwrap();
        let e = small();
        assert!(t_dr(5, 3, &mp, 3, 3, TdrMode::Bound2, 0.75, &e).unwrap() > 0.0);
        assert!(t_dr(5, 3, &mp, 3, 1, TdrMode::Bound2, 0.75, &e).is_err());
        let b = common_bounds(5, 3, &mp, 0.75).unwrap();
        assert!((b.s_one + b.s_two - b.s_total).abs() < 1e-15);
        assert!(b.psi_m.unwrap() > 1.0);
    }
}
