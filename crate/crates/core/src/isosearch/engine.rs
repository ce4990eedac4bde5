//! Depth-first branch and bound over the vertices of the first graph.
//!
//! Each vertex of `x`, taken in a static order (descending degree), is
//! either mapped to a vertex of `y` from its candidate bitset or skipped,
//! with at most `max_skips` skips. Assigning `u -> v` intersects every
//! later candidate set with `N(v)` or with the non-neighbourhood of `v`,
//! so candidate sets are always either identical or disjoint. That makes
//! `mapped + Σ_class min(#vertices, #candidates)` an upper bound on the
//! number of pairs still reachable.

use crate::graphs::{words_for, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    First,
    Count,
}

pub(crate) struct Run {
    pub nodes: u64,
    pub count: u128,
    pub first: Option<Vec<(usize, usize)>>,
    pub exhausted: bool,
}

pub(crate) struct Engine<'a> {
    x: &'a Graph,
    y: &'a Graph,
    order: Vec<usize>,
    target: usize,
    max_skips: usize,
    mode: Mode,
    budget: u64,
    w: usize,
    /// `levels[k]` holds the candidate sets of positions `k..len`.
    levels: Vec<Vec<u64>>,
    /// Complement of the closed neighbourhood of each `y` vertex.
    non_adj: Vec<u64>,
    assignment: Vec<Option<usize>>,
    nodes: u64,
    count: u128,
    first: Option<Vec<(usize, usize)>>,
    exhausted: bool,
}

enum Flow {
    Continue,
    Stop,
}

impl<'a> Engine<'a> {
    pub fn new(x: &'a Graph, y: &'a Graph, target: usize, max_skips: usize, mode: Mode, budget: u64) -> Self {
        let mut order: Vec<usize> = (0..x.n()).collect();
        order.sort_by_key(|&u| (std::cmp::Reverse(x.degree(u)), u));
        let w = words_for(y.n());
        let mut full = vec![0u64; w];
        for v in 0..y.n() {
            full[v / 64] |= 1 << (v % 64);
        }
        let mut non_adj = vec![0u64; y.n() * w];
        for v in 0..y.n() {
            for (k, word) in y.row(v).iter().enumerate() {
                non_adj[v * w + k] = !word & full[k];
            }
            non_adj[v * w + v / 64] &= !(1 << (v % 64));
        }
        let mut root = Vec::with_capacity(x.n() * w);
        for _ in 0..x.n() {
            root.extend_from_slice(&full);
        }
        Engine {
            x,
            y,
            order,
            target,
            max_skips,
            mode,
            budget,
            w,
            levels: vec![root],
            non_adj,
            assignment: vec![None; x.n()],
            nodes: 0,
            count: 0,
            first: None,
            exhausted: false,
        }
    }

    pub fn run(mut self) -> Run {
        self.search(0, 0);
        Run { nodes: self.nodes, count: self.count, first: self.first, exhausted: self.exhausted }
    }

    fn bound(&self, k: usize) -> usize {
        let w = self.w;
        let level = &self.levels[k];
        let mut classes: Vec<&[u64]> = level.chunks_exact(w.max(1)).collect();
        if w == 0 {
            return 0;
        }
        classes.sort_unstable();
        let mut total = 0;
        let mut i = 0;
        while i < classes.len() {
            let mut j = i + 1;
            while j < classes.len() && classes[j] == classes[i] {
                j += 1;
            }
            let size: usize = classes[i].iter().map(|x| x.count_ones() as usize).sum();
            total += size.min(j - i);
            i = j;
        }
        total
    }

    fn record(&mut self) {
        match self.mode {
            Mode::Count => self.count += 1,
            Mode::First => {
                let pairs = self.order.iter().zip(&self.assignment).filter_map(|(&u, v)| v.map(|v| (u, v))).collect();
                self.first = Some(pairs);
            }
        }
    }

    fn search(&mut self, k: usize, mapped: usize) -> Flow {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return Flow::Stop;
        }
        if mapped == self.target {
            self.record();
            return match self.mode {
                Mode::First => Flow::Stop,
                Mode::Count => Flow::Continue,
            };
        }
        let len = self.order.len();
        if k == len || mapped + (len - k) < self.target {
            return Flow::Continue;
        }
        if mapped + self.bound(k) < self.target {
            return Flow::Continue;
        }

        let u = self.order[k];
        let w = self.w;
        if self.levels.len() <= k + 1 {
            self.levels.push(vec![0; (len - k - 1) * w]);
        }

        // Same label first, then ascending: equal graphs yield the identity.
        let candidates = {
            let dom = &self.levels[k][..w];
            let mut c = Vec::new();
            if u < self.y.n() && dom[u / 64] >> (u % 64) & 1 == 1 {
                c.push(u);
            }
            for (wi, &word) in dom.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let v = wi * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if v != u {
                        c.push(v);
                    }
                }
            }
            c
        };

        for v in candidates {
            {
                let (lo, hi) = self.levels.split_at_mut(k + 1);
                let cur = &lo[k];
                let next = &mut hi[0];
                let nbr = self.y.row(v);
                let non = &self.non_adj[v * w..(v + 1) * w];
                for (i, &u2) in self.order[k + 1..].iter().enumerate() {
                    let src = &cur[(i + 1) * w..(i + 2) * w];
                    let dst = &mut next[i * w..(i + 1) * w];
                    let mask = if self.x.has_edge(u, u2) { nbr } else { non };
                    for t in 0..w {
                        dst[t] = src[t] & mask[t];
                    }
                }
            }
            self.assignment[k] = Some(v);
            let flow = self.search(k + 1, mapped + 1);
            self.assignment[k] = None;
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
        }

        if k - mapped < self.max_skips {
            {
                let (lo, hi) = self.levels.split_at_mut(k + 1);
                hi[0].copy_from_slice(&lo[k][w..]);
            }
            if let Flow::Stop = self.search(k + 1, mapped) {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }
}
