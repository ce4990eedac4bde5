//! Exact solvers for induced embedding and for common induced subgraphs of
//! a prescribed size, in existence, counting and budgeted modes.

mod engine;
mod maps;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::Graph;
use engine::{Engine, Mode};

pub use maps::{is_partial_isomorphism, Injection, PartialInjection};

/// Search-tree node budget for one solver call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(100_000_000)
    }
}

impl Budget {
    pub const UNLIMITED: Budget = Budget(u64::MAX);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    ExhaustedNone,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Embedding(Injection),
    /// `D f` and `R f` are the vertex sets of the two isomorphic restrictions.
    Common(PartialInjection),
}

impl Witness {
    /// Re-checks the witness against the graphs it was produced for.
    pub fn verify(&self, x: &Graph, y: &Graph) -> Result<bool> {
        match self {
            Witness::Embedding(f) => {
                // f(x) must equal the restriction of y to R f, as graphs.
                let range = f.range();
                let restricted = y.induced_subgraph(&range)?;
                let relabel: Vec<usize> = f.image().iter().map(|v| range.binary_search(v).unwrap()).collect();
                x.is_isomorphism(&restricted, &relabel)
            }
            Witness::Common(f) => {
                let dx = x.induced_subgraph(f.domain())?;
                let range = f.range();
                let dy = y.induced_subgraph(&range)?;
                let relabel: Vec<usize> = f.image().iter().map(|v| range.binary_search(v).unwrap()).collect();
                dx.is_isomorphism(&dy, &relabel)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub witness: Option<Witness>,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub value: BigUint,
    pub nodes: u64,
}

fn check_embed_sizes(x: &Graph, y: &Graph) -> Result<()> {
    if x.n() > y.n() {
        return Err(Error::Size(format!("pattern has {} vertices but host only {}", x.n(), y.n())));
    }
    Ok(())
}

fn check_common_sizes(x: &Graph, y: &Graph, m: usize) -> Result<()> {
    if m > x.n() || m > y.n() {
        return Err(Error::Size(format!("m = {m} exceeds graph sizes {} and {}", x.n(), y.n())));
    }
    Ok(())
}

/// Does `x` occur as an induced subgraph of `y`?
pub fn embed_exists(x: &Graph, y: &Graph, budget: Budget) -> Result<SearchOutcome> {
    check_embed_sizes(x, y)?;
    let run = Engine::new(x, y, x.n(), 0, Mode::First, budget.0).run();
    let witness = match run.first {
        Some(pairs) => {
            let mut image = vec![0; x.n()];
            for (u, v) in pairs {
                image[u] = v;
            }
            Some(Witness::Embedding(Injection::new(y.n(), image)?))
        }
        None => None,
    };
    Ok(outcome(witness, run.exhausted, run.nodes, x, y))
}

/// Number of injections `f` with `f(x)` equal to the restriction of `y` to `R f`.
pub fn embed_count(x: &Graph, y: &Graph, budget: Budget) -> Result<CountResult> {
    check_embed_sizes(x, y)?;
    let run = Engine::new(x, y, x.n(), 0, Mode::Count, budget.0).run();
    count_result(run.count, run.nodes, run.exhausted)
}

/// Is there a size-`m` induced subgraph of `x` isomorphic to one of `y`?
pub fn common_exists(x: &Graph, y: &Graph, m: usize, budget: Budget) -> Result<SearchOutcome> {
    check_common_sizes(x, y, m)?;
    let run = Engine::new(x, y, m, x.n() - m, Mode::First, budget.0).run();
    let witness = match run.first {
        Some(pairs) => Some(Witness::Common(PartialInjection::from_pairs(x.n(), y.n(), pairs)?)),
        None => None,
    };
    Ok(outcome(witness, run.exhausted, run.nodes, x, y))
}

/// Number of `m`-isomorphisms, i.e. partial injections with `|D f| = m` and `J_f = 1`.
pub fn common_count(x: &Graph, y: &Graph, m: usize, budget: Budget) -> Result<CountResult> {
    check_common_sizes(x, y, m)?;
    let run = Engine::new(x, y, m, x.n() - m, Mode::Count, budget.0).run();
    count_result(run.count, run.nodes, run.exhausted)
}

fn outcome(witness: Option<Witness>, exhausted: bool, nodes: u64, x: &Graph, y: &Graph) -> SearchOutcome {
    if let Some(w) = &witness {
        debug_assert!(w.verify(x, y).unwrap_or(false), "solver produced an invalid witness");
    }
    let status = match (&witness, exhausted) {
        (Some(_), _) => SearchStatus::Found,
        (None, true) => SearchStatus::BudgetExceeded,
        (None, false) => SearchStatus::ExhaustedNone,
    };
    SearchOutcome { status, witness, nodes }
}

fn count_result(count: u128, nodes: u64, exhausted: bool) -> Result<CountResult> {
    if exhausted {
        Err(Error::BudgetExceeded { partial: BigUint::from(count), nodes })
    } else {
        Ok(CountResult { value: BigUint::from(count), nodes })
    }
}

/// Result of the descending scan for the largest common induced subgraph.
#[derive(Clone, Debug)]
pub struct MaxCommon {
    /// Largest `m` with a verified witness.
    pub best: usize,
    pub witness: Option<PartialInjection>,
    /// Smallest `m` proven impossible, if any level above `best` was refuted.
    pub smallest_refuted: Option<usize>,
    /// True when every level above `best` was refuted; otherwise the sizes
    /// strictly between `best` and `smallest_refuted` (or the top) are
    /// inconclusive.
    pub exact: bool,
    pub nodes: u64,
}

/// Scans `m` downward from `min(|x|, |y|)`, one exhaustive search per level,
/// each with its own `budget`.
pub fn max_common_size(x: &Graph, y: &Graph, budget: Budget) -> Result<MaxCommon> {
    let top = x.n().min(y.n());
    let mut smallest_refuted = None;
    let mut exact = true;
    let mut nodes = 0;
    for m in (0..=top).rev() {
        let out = common_exists(x, y, m, budget)?;
        nodes += out.nodes;
        match out.status {
            SearchStatus::Found => {
                let witness = match out.witness {
                    Some(Witness::Common(f)) => Some(f),
                    _ => None,
                };
                return Ok(MaxCommon { best: m, witness, smallest_refuted, exact, nodes });
            }
            SearchStatus::ExhaustedNone => smallest_refuted = Some(m),
            SearchStatus::BudgetExceeded => exact = false,
        }
    }
    unreachable!("m = 0 always has the empty witness")
}
