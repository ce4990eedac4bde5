//! Simple undirected graphs on `0..n` stored as fixed-width adjacency bitrows.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::rng;

/// Largest accepted vertex count.
pub const MAX_VERTICES: usize = 4096;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Symmetric, loop-free adjacency. Row `i` occupies `words` consecutive
/// `u64`s; bits past `n` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("edges", &self.edges().collect::<Vec<_>>()).finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::GraphTooLarge { n, limit: MAX_VERTICES });
        }
        let words = words_for(n);
        Ok(Graph { n, words, rows: vec![0; n * words] })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            for j in i + 1..n {
                g.set_edge(i, j);
            }
        }
        Ok(g)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 1..n {
            g.set_edge(i - 1, i);
        }
        Ok(g)
    }

    /// Star with centre 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 1..n {
            g.set_edge(0, i);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a >= self.n || b >= self.n {
            return Err(Error::InvalidInput(format!("edge ({a}, {b}) out of range for n = {}", self.n)));
        }
        if a == b {
            return Err(Error::InvalidInput(format!("self-loop at vertex {a}")));
        }
        self.set_edge(a, b);
        Ok(())
    }

    #[inline]
    fn set_edge(&mut self, a: usize, b: usize) {
        self.rows[a * self.words + b / 64] |= 1 << (b % 64);
        self.rows[b * self.words + a / 64] |= 1 << (a % 64);
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    /// Neighbourhood bitrow of `v`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    /// Restriction to the strictly increasing subset `s`, relabelled by rank.
    pub fn induced_subgraph(&self, s: &[usize]) -> Result<Graph> {
        for (k, &v) in s.iter().enumerate() {
            if v >= self.n {
                return Err(Error::InvalidSubset(format!("vertex {v} out of range for n = {}", self.n)));
            }
            if k > 0 && s[k - 1] >= v {
                return Err(Error::InvalidSubset(format!(
                    "subset must be strictly increasing (found {} then {v})",
                    s[k - 1]
                )));
            }
        }
        let mut h = Graph::empty(s.len())?;
        for a in 0..s.len() {
            for b in a + 1..s.len() {
                if self.has_edge(s[a], s[b]) {
                    h.set_edge(a, b);
                }
            }
        }
        Ok(h)
    }

    /// Checks that `f` (given as `f[i]` = image of `i`) is a bijection from
    /// `self` onto `h` with `e ∈ E(self) ⟺ f(e) ∈ E(h)`.
    pub fn is_isomorphism(&self, h: &Graph, f: &[usize]) -> Result<bool> {
        if self.n != h.n || f.len() != self.n {
            return Err(Error::InvalidMap(format!(
                "size mismatch: |V(g)| = {}, |V(h)| = {}, |f| = {}",
                self.n,
                h.n,
                f.len()
            )));
        }
        let mut seen = vec![false; self.n];
        for &v in f {
            if v >= self.n || seen[v] {
                return Err(Error::InvalidMap("map is not a permutation".into()));
            }
            seen[v] = true;
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) != h.has_edge(f[i], f[j]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Text fixture format: first line `n`, then one `i j` line per edge
    /// with `i < j`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}").unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Graph> {
        Self::read_text(text.as_bytes())
    }

    pub fn read_text(reader: impl BufRead) -> Result<Graph> {
        let mut graph: Option<Graph> = None;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let mut it = line.split_whitespace();
            let Some(first) = it.next() else { continue };
            let parse = |tok: &str| {
                tok.parse::<usize>().map_err(|e| Error::Parse { line: lineno, msg: format!("{tok:?}: {e}") })
            };
            match graph.as_mut() {
                None => {
                    if it.next().is_some() {
                        return Err(Error::Parse { line: lineno, msg: "expected vertex count".into() });
                    }
                    graph = Some(Graph::empty(parse(first)?)?);
                }
                Some(g) => {
                    let a = parse(first)?;
                    let b = it
                        .next()
                        .ok_or_else(|| Error::Parse { line: lineno, msg: "edge line needs two endpoints".into() })?;
                    let b = parse(b)?;
                    if it.next().is_some() {
                        return Err(Error::Parse { line: lineno, msg: "trailing tokens".into() });
                    }
                    if a >= b {
                        return Err(Error::Parse { line: lineno, msg: format!("edge {a} {b} must satisfy i < j") });
                    }
                    g.add_edge(a, b).map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
                }
            }
        }
        graph.ok_or_else(|| Error::Parse { line: 0, msg: "missing vertex count".into() })
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        let mut h = Graph::empty(self.n)?;
        for (i, j) in self.edges() {
            h.set_edge(perm[i], perm[j]);
        }
        Ok(h)
    }
}

/// Law of G(n, p) together with the seed driving one draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeLaw {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl EdgeLaw {
    pub fn new(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!("edge probability {p} not in [0, 1]")));
        }
        if n > MAX_VERTICES {
            return Err(Error::GraphTooLarge { n, limit: MAX_VERTICES });
        }
        Ok(EdgeLaw { n, p, seed })
    }
}

/// One uniform draw per pair `{i, j}`, `i < j`, in lexicographic order;
/// the pair is an edge iff the draw is below `p`.
pub fn sample_gnp(law: EdgeLaw) -> Graph {
    let mut g = Graph::empty(law.n).expect("EdgeLaw enforces the size cap");
    let mut rng = rng::stream(law.seed);
    for i in 0..law.n {
        for j in i + 1..law.n {
            if rng::uniform(&mut rng) < law.p {
                g.set_edge(i, j);
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_invariants(g: &Graph) {
        for i in 0..g.n() {
            assert!(!g.has_edge(i, i));
            for j in 0..g.n() {
                assert_eq!(g.has_edge(i, j), g.has_edge(j, i));
            }
        }
    }

    #[test]
    fn extreme_probabilities() {
        let g = sample_gnp(EdgeLaw::new(5, 0.0, 99).unwrap());
        assert_eq!(g.edge_count(), 0);
        let g = sample_gnp(EdgeLaw::new(5, 1.0, 99).unwrap());
        assert_eq!(g, Graph::complete(5).unwrap());
    }

    #[test]
    fn mean_edge_count_matches_binomial() {
        let trials = 10_000u64;
        let total: usize = (0..trials).map(|s| sample_gnp(EdgeLaw::new(30, 0.5, s).unwrap()).edge_count()).sum();
        let mean = total as f64 / trials as f64;
        // Binomial(435, 1/2): sd of the mean = sqrt(435/4 / 10^4).
        let sd = (435.0 * 0.25 / trials as f64).sqrt();
        assert!((mean - 217.5).abs() <= 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn rejects_oversized_and_bad_p() {
        assert!(matches!(Graph::empty(MAX_VERTICES + 1), Err(Error::GraphTooLarge { .. })));
        assert!(EdgeLaw::new(3, 1.5, 0).is_err());
        assert!(EdgeLaw::new(3, -0.1, 0).is_err());
    }

    #[test]
    fn induced_examples() {
        let p3 = Graph::path(3).unwrap();
        let h = p3.induced_subgraph(&[0, 2]).unwrap();
        assert_eq!(h, Graph::empty(2).unwrap());
        let k4 = Graph::complete(4).unwrap();
        assert_eq!(k4.induced_subgraph(&[1, 3]).unwrap(), Graph::complete(2).unwrap());
        assert_eq!(k4.induced_subgraph(&[0, 1, 2, 3]).unwrap(), k4);
        assert!(matches!(k4.induced_subgraph(&[1, 1]), Err(Error::InvalidSubset(_))));
        assert!(matches!(k4.induced_subgraph(&[2, 1]), Err(Error::InvalidSubset(_))));
        assert!(matches!(k4.induced_subgraph(&[4]), Err(Error::InvalidSubset(_))));
    }

    #[test]
    fn isomorphism_examples() {
        let k3 = Graph::complete(3).unwrap();
        for perm in [[0, 1, 2], [1, 2, 0], [2, 1, 0]] {
            assert!(k3.is_isomorphism(&k3, &perm).unwrap());
        }
        let p4 = Graph::path(4).unwrap();
        let star = Graph::star(4).unwrap();
        for perm in permutations(4) {
            assert!(!p4.is_isomorphism(&star, &perm).unwrap());
        }
        assert!(matches!(k3.is_isomorphism(&k3, &[0, 0, 1]), Err(Error::InvalidMap(_))));
        assert!(matches!(k3.is_isomorphism(&p4, &[0, 1, 2]), Err(Error::InvalidMap(_))));
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn text_format() {
        let g = Graph::parse_text("4\n0 1\n 1 3 \n\n").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 3)]);
        assert_eq!(Graph::parse_text(&g.to_text()).unwrap(), g);
        assert!(Graph::parse_text("3\n1 0\n").is_err());
        assert!(Graph::parse_text("3\n0 3\n").is_err());
        assert!(Graph::parse_text("").is_err());
    }

    fn graph_strategy() -> impl Strategy<Value = Graph> {
        (0usize..9, any::<u64>(), 0.0f64..=1.0).prop_map(|(n, seed, p)| sample_gnp(EdgeLaw::new(n, p, seed).unwrap()))
    }

    proptest! {
        #[test]
        fn sampling_is_deterministic_and_well_formed(n in 0usize..70, seed: u64, p in 0.0f64..=1.0) {
            let law = EdgeLaw::new(n, p, seed).unwrap();
            let g = sample_gnp(law);
            check_invariants(&g);
            prop_assert_eq!(g, sample_gnp(law));
        }

        #[test]
        fn restriction_composes(g in graph_strategy(), mask_s: u16, mask_t: u16) {
            let s: Vec<usize> = (0..g.n()).filter(|i| mask_s >> i & 1 == 1).collect();
            let t: Vec<usize> = (0..s.len()).filter(|i| mask_t >> i & 1 == 1).collect();
            let composed: Vec<usize> = t.iter().map(|&i| s[i]).collect();
            let twice = g.induced_subgraph(&s).unwrap().induced_subgraph(&t).unwrap();
            prop_assert_eq!(twice, g.induced_subgraph(&composed).unwrap());
        }

        #[test]
        fn isomorphism_inverse(g in graph_strategy(), seed: u64) {
            let mut r = rng::stream(seed);
            let perm = rng::sample_distinct(&mut r, g.n(), g.n());
            let h = g.permuted(&perm).unwrap();
            let h2 = sample_gnp(EdgeLaw::new(g.n(), 0.5, seed).unwrap());
            let mut inv = vec![0; g.n()];
            for (i, &v) in perm.iter().enumerate() {
                inv[v] = i;
            }
            prop_assert!(g.is_isomorphism(&h, &perm).unwrap());
            prop_assert!(h.is_isomorphism(&g, &inv).unwrap());
            prop_assert_eq!(g.is_isomorphism(&h2, &perm).unwrap(), h2.is_isomorphism(&g, &inv).unwrap());
        }
    }
}
