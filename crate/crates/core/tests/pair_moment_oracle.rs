mod common;

use isophase::edgegraph::{build_common_edge_graph, build_embedding_edge_graph, classify_components, pair_moment};
use isophase::isosearch::{Injection, PartialInjection};
use isophase::moments::{second_moment_exact, Enumeration};
use isophase::params::{ModelParams, Problem};
use isophase::rng::{below, stream};
use isophase::verify::{random_partial_pair, random_total_pair};

use common::{choose2, common_oracle, has, pair_list, pair_slot, rel_diff};

fn weight(code: u32, pairs: usize, p: f64) -> f64 {
    let e = code.count_ones() as i32;
    p.powi(e) * (1.0 - p).powi(pairs as i32 - e)
}

/// `P(f and g are both isomorphisms)`, summing over every pair of graphs
/// on `nx` and `ny` vertices.
fn brute_pair_probability(nx: usize, ny: usize, f: &[(usize, usize)], g: &[(usize, usize)], p: f64, q: f64) -> f64 {
    let (sx, sy) = (pair_slot(nx), pair_slot(ny));
    let ok = |x: u32, y: u32, map: &[(usize, usize)]| {
        pair_list(map.len()).iter().all(|&(i, j)| has(x, &sx, map[i].0, map[j].0) == has(y, &sy, map[i].1, map[j].1))
    };
    let mut total = 0.0;
    for x in 0..1u32 << choose2(nx) {
        let wx = weight(x, choose2(nx), p);
        for y in 0..1u32 << choose2(ny) {
            if ok(x, y, f) && ok(x, y, g) {
                total += wx * weight(y, choose2(ny), q);
            }
        }
    }
    total
}

#[test]
fn partial_pair_moments_match_graph_enumeration() {
    let mut rng = stream(21);
    for case in 0..300 {
        let n = 2 + below(&mut rng, 3) as usize;
        let m = 1 + below(&mut rng, n as u64) as usize;
        let (f, g): (PartialInjection, PartialInjection) = random_partial_pair(&mut rng, n, m);
        let (p, q) = ([0.2, 0.35, 0.5, 0.8][case % 4], [0.3, 0.5, 0.65, 0.9][case / 4 % 4]);
        let params = ModelParams::new(p, q).unwrap();
        let prof = classify_components(&build_common_edge_graph(&f, &g).unwrap()).unwrap();
        let got = pair_moment(&prof, &params, Problem::Common);
        let fp: Vec<_> = f.pairs().collect();
        let gp: Vec<_> = g.pairs().collect();
        let want = brute_pair_probability(n, n, &fp, &gp, p, q);
        assert!(rel_diff(got, want) < 1e-12, "case {case}: {got} vs {want} for {fp:?} {gp:?}");
    }
}

#[test]
fn total_pair_moments_match_graph_enumeration() {
    let mut rng = stream(22);
    for case in 0..300 {
        let n = 2 + below(&mut rng, 3) as usize;
        let m = 1 + below(&mut rng, n as u64) as usize;
        let (f, g): (Injection, Injection) = random_total_pair(&mut rng, n, m);
        let p = [0.2, 0.5, 0.7][case % 3];
        let params = ModelParams::embedding(p).unwrap();
        let prof = classify_components(&build_embedding_edge_graph(&f, &g).unwrap()).unwrap();
        let got = pair_moment(&prof, &params, Problem::Embed);
        let fp: Vec<_> = f.image().iter().copied().enumerate().collect();
        let gp: Vec<_> = g.image().iter().copied().enumerate().collect();
        let want = brute_pair_probability(m, n, &fp, &gp, p, 0.5);
        assert!(rel_diff(got, want) < 1e-12, "case {case}: {got} vs {want}");
    }
}

#[test]
fn second_moment_off_grid() {
    let (n, m, p, q) = (3, 2, 0.3, 0.6);
    let (_, want) = common_oracle(n, m).moments(p, q);
    let params = ModelParams::new(p, q).unwrap();
    let got = second_moment_exact(n, m, &params, Problem::Common, &Enumeration::default()).unwrap();
    assert!(rel_diff(got.second, want) < 1e-12);
}
