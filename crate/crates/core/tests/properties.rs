use proptest::prelude::*;

use semistream::bfs::{bfs_deterministic, bfs_randomized, BfsConfig};
use semistream::dfs::{dfs_aa, dfs_simple};
use semistream::harness::{generate, parse_stream, write_stream, Generator};
use semistream::mlst::{build_sparsifier_with_k, count_inodes, dead_leaf_tree};
use semistream::oracle::{exact_distances, is_bfs_tree, is_dfs_tree};
use semistream::sketch::{L0Query, L0Sketch};
use semistream::{AdjacencyGraph, StreamSession};

fn gnp() -> impl Strategy<Value = (usize, f64, u64)> {
    (3usize..40, 0.02f64..0.6, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stream_text_round_trips((n, p, seed) in gnp(), churn in any::<bool>()) {
        let mut s = generate(&Generator::Gnp { n, p }, seed).unwrap();
        if churn {
            s = s.with_churn(seed, n).unwrap();
        }
        let back = parse_stream(&write_stream(&s)).unwrap();
        prop_assert_eq!(back.model(), s.model());
        prop_assert_eq!(back.materialize().unwrap().edges().collect::<Vec<_>>(), s.materialize().unwrap().edges().collect::<Vec<_>>());
    }

    #[test]
    fn l0_sketches_are_linear(ups in prop::collection::vec((0u64..1000, -3i64..=3), 0..30), seed in any::<u64>()) {
        let mut whole = L0Sketch::with_seed(1000, seed);
        let mut parts = [L0Sketch::with_seed(1000, seed), L0Sketch::with_seed(1000, seed)];
        let mut count = std::collections::BTreeMap::new();
        for (i, &(x, d)) in ups.iter().enumerate() {
            whole.update(x, d);
            parts[i % 2].update(x, d);
            *count.entry(x).or_insert(0i64) += d;
        }
        let [mut a, b] = parts;
        a.add(&b).unwrap();
        prop_assert_eq!(a.to_bytes(), whole.to_bytes());
        match whole.query() {
            L0Query::Empty => prop_assert!(count.values().all(|&c| c == 0)),
            L0Query::Index(x) => prop_assert!(count.get(&x).is_some_and(|&c| c != 0)),
            L0Query::Fail => {}
        }
    }

    #[test]
    fn dead_leaf_tree_meets_its_bound((n, p, seed) in gnp()) {
        let g = generate(&Generator::Gnp { n, p }, seed).unwrap().materialize().unwrap();
        let t = dead_leaf_tree(&g, 0).unwrap();
        t.check_spans(&g).unwrap();
        prop_assert!(10 * t.leaf_count() + count_inodes(&g) >= n);
    }

    #[test]
    fn sparsifier_is_a_connected_subgraph((n, p, seed) in gnp(), k in 1usize..5) {
        let s = generate(&Generator::Gnp { n, p }, seed).unwrap();
        let g = s.materialize().unwrap();
        let r = build_sparsifier_with_k(&mut StreamSession::new(&s), k, seed).unwrap();
        let h = AdjacencyGraph::from_edges(n, r.edges.iter().copied()).unwrap();
        prop_assert!(h.is_connected() && h.is_subgraph_of(&g));
        prop_assert!(h.m() <= (k + 1) * n);
    }

    #[test]
    fn bfs_trees_are_exact((n, p, seed) in gnp(), pass in 1usize..5) {
        let s = generate(&Generator::Gnp { n, p }, seed).unwrap();
        let g = s.materialize().unwrap();
        let root = seed as usize % n;
        let truth = exact_distances(&g, &[root]).remove(0);
        let d = bfs_deterministic(&mut StreamSession::new(&s), root, pass).unwrap();
        prop_assert_eq!(&d.dist, &truth);
        prop_assert!(is_bfs_tree(&g, &d.tree().unwrap()));
        if let Ok((r, _)) = bfs_randomized(&mut StreamSession::new(&s), root, &BfsConfig::new(n.div_ceil(3), seed)) {
            prop_assert_eq!(&r.dist, &truth);
        }
    }

    #[test]
    fn dfs_trees_are_valid((n, p, seed) in gnp(), k in 1usize..6) {
        let s = generate(&Generator::Gnp { n, p }, seed).unwrap();
        let g = s.materialize().unwrap();
        let root = seed as usize % n;
        let simple = dfs_simple(&mut StreamSession::new(&s), root, k, seed).unwrap();
        prop_assert!(is_dfs_tree(&g, &simple.tree));
        let k = k.min(n);
        let aa = dfs_aa(&mut StreamSession::new(&s), root, k, 1 + seed as usize % k, seed).unwrap();
        prop_assert!(is_dfs_tree(&g, &aa.tree));
    }
}
