//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library: graphs are bitmask codes over vertex pairs, and
//! isomorphism counts come from trying every permutation.

#![allow(dead_code)]

/// Vertex pairs of `[k]` in lexicographic order.
pub fn pair_list(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect()
}

pub fn pair_slot(k: usize) -> Vec<Vec<usize>> {
    let mut slot = vec![vec![usize::MAX; k]; k];
    for (idx, (i, j)) in pair_list(k).into_iter().enumerate() {
        slot[i][j] = idx;
        slot[j][i] = idx;
    }
    slot
}

pub fn choose2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

pub fn has(code: u32, slot: &[Vec<usize>], a: usize, b: usize) -> bool {
    code >> slot[a][b] & 1 == 1
}

/// Increasing `m`-subsets of `[k]`.
pub fn subsets(k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..1 << k {
        if mask.count_ones() as usize == m {
            out.push((0..k).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Ordered `m`-tuples of distinct elements of `[k]`.
pub fn arrangements(k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for t in &out {
            for v in 0..k {
                if !t.contains(&v) {
                    let mut t2 = t.clone();
                    t2.push(v);
                    next.push(t2);
                }
            }
        }
        out = next;
    }
    out
}

/// Code of the graph induced on `s` (relabelled `0..s.len()` in order).
pub fn restrict(code: u32, k: usize, s: &[usize]) -> u32 {
    let slot = pair_slot(k);
    let mut out = 0;
    for (idx, (i, j)) in pair_list(s.len()).into_iter().enumerate() {
        if has(code, &slot, s[i], s[j]) {
            out |= 1 << idx;
        }
    }
    out
}

/// `iso[a][b]`: permutations `pi` with `a_{ij} = b_{pi(i) pi(j)}`.
pub fn iso_table(m: usize) -> Vec<Vec<u64>> {
    let slot = pair_slot(m);
    let codes = 1usize << choose2(m);
    let perms = arrangements(m, m);
    let mut table = vec![vec![0u64; codes]; codes];
    for a in 0..codes {
        for b in 0..codes {
            table[a][b] = perms
                .iter()
                .filter(|pi| {
                    pair_list(m).iter().all(|&(i, j)| has(a as u32, &slot, i, j) == has(b as u32, &slot, pi[i], pi[j]))
                })
                .count() as u64;
        }
    }
    table
}

/// For every graph code on `k` vertices, how many `m`-subsets induce each
/// code on `m` vertices.
pub fn restriction_histograms(k: usize, m: usize) -> Vec<Vec<u64>> {
    let subs = subsets(k, m);
    (0..1u32 << choose2(k))
        .map(|g| {
            let mut h = vec![0u64; 1 << choose2(m)];
            for s in &subs {
                h[restrict(g, k, s) as usize] += 1;
            }
            h
        })
        .collect()
}

/// `Σ N` and `Σ N^2` over graph pairs, bucketed by the two edge counts, so
/// any `(p, q)` reweights the same table.
pub struct Buckets {
    pub x_pairs: usize,
    pub y_pairs: usize,
    /// `[ex][ey] -> (Σ N, Σ N^2)`.
    pub sums: Vec<Vec<(u128, u128)>>,
}

impl Buckets {
    fn new(x_pairs: usize, y_pairs: usize) -> Self {
        Buckets { x_pairs, y_pairs, sums: vec![vec![(0, 0); y_pairs + 1]; x_pairs + 1] }
    }

    fn add(&mut self, ex: usize, ey: usize, n: u64) {
        let cell = &mut self.sums[ex][ey];
        cell.0 += n as u128;
        cell.1 += (n as u128) * (n as u128);
    }

    /// `(E N, E N^2)` with `x ~ G(., p)` and `y ~ G(., q)`.
    pub fn moments(&self, p: f64, q: f64) -> (f64, f64) {
        let (mut first, mut second) = (0.0, 0.0);
        for (ex, row) in self.sums.iter().enumerate() {
            let wx = p.powi(ex as i32) * (1.0 - p).powi((self.x_pairs - ex) as i32);
            for (ey, &(s1, s2)) in row.iter().enumerate() {
                let w = wx * q.powi(ey as i32) * (1.0 - q).powi((self.y_pairs - ey) as i32);
                first += w * s1 as f64;
                second += w * s2 as f64;
            }
        }
        (first, second)
    }
}

/// Induced embeddings of a graph on `m` vertices into a graph on `n`.
pub fn embedding_oracle(n: usize, m: usize) -> Buckets {
    let iso = iso_table(m);
    let hy = restriction_histograms(n, m);
    let mut b = Buckets::new(choose2(m), choose2(n));
    for x in 0..1usize << choose2(m) {
        for (y, h) in hy.iter().enumerate() {
            let count: u64 = h.iter().enumerate().map(|(t, &c)| c * iso[x][t]).sum();
            b.add(x.count_ones() as usize, y.count_ones() as usize, count);
        }
    }
    b
}

/// `m`-isomorphisms between two graphs on `n` vertices.
pub fn common_oracle(n: usize, m: usize) -> Buckets {
    let iso = iso_table(m);
    let h = restriction_histograms(n, m);
    let codes = 1usize << choose2(m);
    // Fold the iso table into the y side once: w[y][a] = Σ_b iso[a][b] h[y][b].
    let w: Vec<Vec<u64>> =
        h.iter().map(|hy| (0..codes).map(|a| (0..codes).map(|b| iso[a][b] * hy[b]).sum()).collect()).collect();
    let mut buckets = Buckets::new(choose2(n), choose2(n));
    for (x, hx) in h.iter().enumerate() {
        for (y, wy) in w.iter().enumerate() {
            let count: u64 = hx.iter().zip(wy).map(|(a, b)| a * b).sum();
            buckets.add(x.count_ones() as usize, y.count_ones() as usize, count);
        }
    }
    buckets
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Overlap statistics of two total maps given as image vectors:
/// `(r, ell)` with `r = |range ∩ range|`, `ell` pointwise agreements.
pub fn total_overlap(f: &[usize], g: &[usize]) -> (usize, usize) {
    let r = f.iter().filter(|v| g.contains(v)).count();
    let ell = f.iter().zip(g).filter(|(a, b)| a == b).count();
    (r, ell)
}

/// `(d, r, ell)` for partial maps given as `(domain, image)` with the
/// domain increasing.
pub fn partial_overlap(f: &(Vec<usize>, Vec<usize>), g: &(Vec<usize>, Vec<usize>)) -> (usize, usize, usize) {
    let mut d = 0;
    let mut ell = 0;
    for (i, u) in f.0.iter().enumerate() {
        if let Some(j) = g.0.iter().position(|x| x == u) {
            d += 1;
            if f.1[i] == g.1[j] {
                ell += 1;
            }
        }
    }
    let r = f.1.iter().filter(|v| g.1.contains(v)).count();
    (d, r, ell)
}

pub fn partial_maps(n: usize, m: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let images = arrangements(n, m);
    subsets(n, m).into_iter().flat_map(|s| images.iter().map(move |im| (s.clone(), im.clone()))).collect()
}
