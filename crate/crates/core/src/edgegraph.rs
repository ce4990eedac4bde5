//! The auxiliary edge graph of a pair of maps and its component census.
//!
//! Left Vertices are vertex pairs of the domain side, right Vertices are
//! vertex pairs of the codomain side, and every left pair `e` is joined to
//! `f(e)` and to `g(e)`. Components are products of independent agreement
//! events, which is what makes `E[J_f J_g]` a product of `tau_{j,k}` terms.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::isosearch::{Injection, PartialInjection};
use crate::params::{ModelParams, Problem};

/// Unordered vertex pair stored as `(low, high)`.
pub type Pair = (u32, u32);

#[inline]
fn pair(a: usize, b: usize) -> Pair {
    if a < b {
        (a as u32, b as u32)
    } else {
        (b as u32, a as u32)
    }
}

fn pairs_of(points: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..points.len()).flat_map(move |i| (i + 1..points.len()).map(move |j| (points[i], points[j])))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeGraphKind {
    /// Two total injections `U -> V`.
    Total,
    /// Two partial injections with domains of equal size.
    Partial,
}

/// Overlap statistics of the generating pair `(f, g)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Overlap {
    /// `|D f ∩ D g|`.
    pub d: usize,
    /// `|R f ∩ R g|`.
    pub r: usize,
    /// `|Z|`, points of the common domain where `f` and `g` agree.
    pub ell: usize,
    /// Pairs of the common domain with `f(e) = g(e)` as sets.
    pub zcal: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeGraph {
    pub kind: EdgeGraphKind,
    /// Domain size of the maps.
    pub m: usize,
    pub left: Vec<Pair>,
    pub right: Vec<Pair>,
    /// `(left index, right index)`, deduplicated.
    pub edges: Vec<(usize, usize)>,
    pub overlap: Overlap,
}

fn index_of(sorted: &[Pair], p: Pair) -> usize {
    sorted.binary_search(&p).expect("pair registered before lookup")
}

fn sorted_dedup<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort_unstable();
    v.dedup();
    v
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    // Both sorted.
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Edge graph of two total injections `f, g : {0..m} -> {0..n}`.
pub fn build_embedding_edge_graph(f: &Injection, g: &Injection) -> Result<EdgeGraph> {
    if f.m() != g.m() || f.n() != g.n() {
        return Err(Error::InvalidMap(format!(
            "injections {}->{} and {}->{} differ in shape",
            f.m(),
            f.n(),
            g.m(),
            g.n()
        )));
    }
    let m = f.m();
    let domain: Vec<usize> = (0..m).collect();
    let left: Vec<Pair> = pairs_of(&domain).map(|(a, b)| pair(a, b)).collect();
    let fe: Vec<Pair> = pairs_of(&domain).map(|(a, b)| pair(f.apply(a), f.apply(b))).collect();
    let ge: Vec<Pair> = pairs_of(&domain).map(|(a, b)| pair(g.apply(a), g.apply(b))).collect();
    let right = sorted_dedup(fe.iter().chain(&ge).copied().collect());
    let mut edges = Vec::with_capacity(2 * left.len());
    let mut zcal = 0;
    for (li, (a, b)) in fe.iter().zip(&ge).enumerate() {
        edges.push((li, index_of(&right, *a)));
        if a == b {
            zcal += 1;
        } else {
            edges.push((li, index_of(&right, *b)));
        }
    }
    let overlap = Overlap {
        d: m,
        r: intersection_size(&f.range(), &g.range()),
        ell: (0..m).filter(|&u| f.apply(u) == g.apply(u)).count(),
        zcal,
    };
    Ok(EdgeGraph { kind: EdgeGraphKind::Total, m, left, right, edges, overlap })
}

/// Edge graph of two partial injections with domains of the same size.
pub fn build_common_edge_graph(f: &PartialInjection, g: &PartialInjection) -> Result<EdgeGraph> {
    if f.m() != g.m() || f.n_domain() != g.n_domain() || f.n_codomain() != g.n_codomain() {
        return Err(Error::InvalidMap("partial injections differ in shape".into()));
    }
    let m = f.m();
    let map_pairs = |h: &PartialInjection| -> Vec<(Pair, Pair)> {
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| (pair(h.domain()[i], h.domain()[j]), pair(h.image()[i], h.image()[j])))
            .collect()
    };
    let fp = map_pairs(f);
    let gp = map_pairs(g);
    let left = sorted_dedup(fp.iter().chain(&gp).map(|(e, _)| *e).collect());
    let right = sorted_dedup(fp.iter().chain(&gp).map(|(_, e)| *e).collect());
    let edges = sorted_dedup(fp.iter().chain(&gp).map(|&(e, fe)| (index_of(&left, e), index_of(&right, fe))).collect());

    let common_domain: Vec<usize> = f.domain().iter().copied().filter(|u| g.get(*u).is_some()).collect();
    let ell = common_domain.iter().filter(|&&u| f.get(u) == g.get(u)).count();
    let zcal = pairs_of(&common_domain)
        .filter(|&(a, b)| pair(f.get(a).unwrap(), f.get(b).unwrap()) == pair(g.get(a).unwrap(), g.get(b).unwrap()))
        .count();
    let overlap = Overlap { d: common_domain.len(), r: intersection_size(&f.range(), &g.range()), ell, zcal };
    Ok(EdgeGraph { kind: EdgeGraphKind::Partial, m, left, right, edges, overlap })
}

impl fmt::Display for EdgeGraph {
    /// Text dump: header, left and right Vertex lists, then the Edge list.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            EdgeGraphKind::Total => "total",
            EdgeGraphKind::Partial => "partial",
        };
        writeln!(out, "edge-graph {kind} m={}", self.m)?;
        writeln!(out, "left {}", self.left.len())?;
        for (i, (a, b)) in self.left.iter().enumerate() {
            writeln!(out, "L{i} {{{a},{b}}}")?;
        }
        writeln!(out, "right {}", self.right.len())?;
        for (i, (a, b)) in self.right.iter().enumerate() {
            writeln!(out, "R{i} {{{a},{b}}}")?;
        }
        writeln!(out, "edges {}", self.edges.len())?;
        for (l, r) in &self.edges {
            writeln!(out, "L{l} R{r}")?;
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Component census of an edge graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ComponentProfile {
    pub m: usize,
    /// `(j, k) -> ` number of components with `j` left and `k` right Vertices.
    pub census: BTreeMap<(usize, usize), usize>,
    /// `j ->` components in class `(j, j)` whose Vertices all have Degree 2.
    pub cycles: BTreeMap<usize, usize>,
    /// `j ->` the remaining `(j, j)` components (paths).
    pub paths_jj: BTreeMap<usize, usize>,
    /// Components with unequal sides that are not paths; always zero for
    /// well-formed maps.
    pub irregular: usize,
    pub left_count: usize,
    pub right_count: usize,
    pub left_deg1: usize,
    pub right_deg1: usize,
    pub d: usize,
    pub r: usize,
    pub ell: usize,
    pub zcal: usize,
}

impl ComponentProfile {
    pub fn c(&self, j: usize, k: usize) -> usize {
        self.census.get(&(j, k)).copied().unwrap_or(0)
    }

    pub fn cycles(&self, j: usize) -> usize {
        self.cycles.get(&j).copied().unwrap_or(0)
    }

    pub fn paths_jj(&self, j: usize) -> usize {
        self.paths_jj.get(&j).copied().unwrap_or(0)
    }

    pub fn component_count(&self) -> usize {
        self.census.values().sum()
    }

    /// `Σ c(j,k) ln tau_{j,k}`, the log of `E[J_f J_g]`.
    pub fn ln_pair_moment(&self, params: &ModelParams, problem: Problem) -> f64 {
        let q = match problem {
            Problem::Embed => 0.5,
            Problem::Common => params.q,
        };
        self.census
            .iter()
            .map(|(&(j, k), &c)| c as f64 * crate::params::tau_jk(params.p, q, j as u32, k as u32).ln())
            .sum()
    }
}

/// Union-find census of the components, with path/cycle tags.
pub fn classify_components(t: &EdgeGraph) -> Result<ComponentProfile> {
    let nl = t.left.len();
    let nr = t.right.len();
    let mut deg = vec![0usize; nl + nr];
    let mut uf = UnionFind::new(nl + nr);
    for &(l, r) in &t.edges {
        if l >= nl || r >= nr {
            return Err(Error::Structural(format!("edge (L{l}, R{r}) out of range")));
        }
        deg[l] += 1;
        deg[nl + r] += 1;
        uf.union(l, nl + r);
    }
    if let Some(v) = deg.iter().position(|&d| d == 0 || d > 2) {
        return Err(Error::Structural(format!("Vertex {v} has Degree {}", deg[v])));
    }

    // root -> (left, right, all Degree 2)
    let mut comps: BTreeMap<usize, (usize, usize, bool)> = BTreeMap::new();
    for v in 0..nl + nr {
        let root = uf.find(v);
        let entry = comps.entry(root).or_insert((0, 0, true));
        if v < nl {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
        entry.2 &= deg[v] == 2;
    }

    let mut profile = ComponentProfile {
        m: t.m,
        left_count: nl,
        right_count: nr,
        left_deg1: deg[..nl].iter().filter(|&&d| d == 1).count(),
        right_deg1: deg[nl..].iter().filter(|&&d| d == 1).count(),
        d: t.overlap.d,
        r: t.overlap.r,
        ell: t.overlap.ell,
        zcal: t.overlap.zcal,
        ..Default::default()
    };
    for (j, k, all_deg2) in comps.into_values() {
        *profile.census.entry((j, k)).or_insert(0) += 1;
        if j == k {
            let slot = if all_deg2 { &mut profile.cycles } else { &mut profile.paths_jj };
            *slot.entry(j).or_insert(0) += 1;
        } else if all_deg2 {
            profile.irregular += 1;
        }
    }
    Ok(profile)
}

/// `E[J_f J_g] = Π tau_{j,k}^{c(j,k)}`, evaluated in log space. The
/// embedding problem uses a host with edge probability 1/2.
pub fn pair_moment(profile: &ComponentProfile, params: &ModelParams, problem: Problem) -> f64 {
    profile.ln_pair_moment(params, problem).exp()
}
