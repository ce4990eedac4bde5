mod common;

use isophase::graphs::Graph;
use isophase::isosearch::{
    common_count, common_exists, embed_count, embed_exists, max_common_size, Budget, SearchStatus,
};
use num_bigint::BigUint;

use common::{arrangements, choose2, has, pair_list, pair_slot, partial_maps};

fn graph(code: u32, k: usize) -> Graph {
    let edges: Vec<(usize, usize)> =
        pair_list(k).into_iter().enumerate().filter(|(i, _)| code >> i & 1 == 1).map(|(_, e)| e).collect();
    Graph::from_edges(k, &edges).unwrap()
}

/// Counts injections preserving adjacency and non-adjacency, by brute force.
fn brute_embeddings(x: u32, m: usize, y: u32, n: usize) -> u64 {
    let (sx, sy) = (pair_slot(m), pair_slot(n));
    arrangements(n, m)
        .iter()
        .filter(|f| pair_list(m).iter().all(|&(i, j)| has(x, &sx, i, j) == has(y, &sy, f[i], f[j])))
        .count() as u64
}

fn brute_common(x: u32, y: u32, n: usize, m: usize) -> u64 {
    let s = pair_slot(n);
    partial_maps(n, m)
        .iter()
        .filter(|(dom, img)| {
            pair_list(m).iter().all(|&(i, j)| has(x, &s, dom[i], dom[j]) == has(y, &s, img[i], img[j]))
        })
        .count() as u64
}

#[test]
fn embedding_counts_match_brute_force() {
    let (m, n) = (3, 5);
    for x in 0..1u32 << choose2(m) {
        for y in 0..1u32 << choose2(n) {
            let (gx, gy) = (graph(x, m), graph(y, n));
            let want = brute_embeddings(x, m, y, n);
            let got = embed_count(&gx, &gy, Budget::UNLIMITED).unwrap().value;
            assert_eq!(got, BigUint::from(want), "x={x} y={y}");
            let found = embed_exists(&gx, &gy, Budget::UNLIMITED).unwrap();
            assert_eq!(found.status == SearchStatus::Found, want > 0);
            if let Some(w) = found.witness {
                assert!(w.verify(&gx, &gy).unwrap());
            }
        }
    }
}

#[test]
fn common_counts_match_brute_force() {
    let n = 4;
    for x in 0..1u32 << choose2(n) {
        for y in (0..1u32 << choose2(n)).step_by(3) {
            let (gx, gy) = (graph(x, n), graph(y, n));
            for m in 0..=n {
                let want = brute_common(x, y, n, m);
                let got = common_count(&gx, &gy, m, Budget::UNLIMITED).unwrap().value;
                assert_eq!(got, BigUint::from(want), "x={x} y={y} m={m}");
                let found = common_exists(&gx, &gy, m, Budget::UNLIMITED).unwrap();
                assert_eq!(found.status == SearchStatus::Found, want > 0, "x={x} y={y} m={m}");
                if let Some(w) = found.witness {
                    assert!(w.verify(&gx, &gy).unwrap());
                }
            }
            let best = max_common_size(&gx, &gy, Budget::UNLIMITED).unwrap();
            let want = (0..=n).rev().find(|&m| brute_common(x, y, n, m) > 0).unwrap();
            assert_eq!(best.best, want);
            assert!(best.exact);
        }
    }
}
