//! Max-leaf spanning trees: the dead-leaf grower, the one-pass sparsifier,
//! approximate MLST on top of it, and connected max cut on regular graphs.

mod dead_leaf;
mod leafy;
mod sparsifier;

pub use dead_leaf::{count_inodes, dead_leaf_bound, dead_leaf_tree, dead_leaf_tree_traced, OperationCounts};
pub use leafy::leafy_spanning_tree;
pub use sparsifier::{build_sparsifier, build_sparsifier_with_k, k_for_epsilon, sparsifier_bound, SparsifierResult, MIN_GUARANTEED_K};

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Node};
use crate::harness::StreamSession;
use crate::rng;
use crate::tree::RootedTree;

/// Builds the sparsifier in one pass, then a leafy spanning tree of it in
/// memory. The result spans the input graph.
pub fn approx_mlst(session: &mut StreamSession<'_>, epsilon: f64, seed: u64) -> Result<RootedTree> {
    let sp = build_sparsifier(session, epsilon, seed)?;
    approx_from_sparsifier(session.n(), &sp)
}

fn approx_from_sparsifier(n: usize, sp: &SparsifierResult) -> Result<RootedTree> {
    let h = AdjacencyGraph::from_edges(n, sp.edges.iter().copied())?;
    leafy_spanning_tree(&h)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutResult {
    pub left: Vec<Node>,
    pub right: Vec<Node>,
    pub cut_value: usize,
}

/// One sampled connected cut of a regular graph: every leaf of an
/// approximate MLST joins L with probability 1/2. Counting the cut takes a
/// second pass.
pub fn connected_max_cut(session: &mut StreamSession<'_>, epsilon: f64, seed: u64) -> Result<CutResult> {
    let n = session.n();
    let sp = build_sparsifier(session, epsilon, seed)?;
    let degrees = &sp.degrees;
    if degrees.iter().any(|&d| d != degrees[0]) {
        return Err(Error::Domain("connected max cut needs a regular graph".into()));
    }
    let tree = approx_from_sparsifier(n, &sp)?;
    let mut r = rng::rng(seed, "cut-leaves");
    let mut in_left = vec![false; n];
    for x in tree.leaves() {
        in_left[x] = r.gen_bool(0.5);
    }
    // keep V \ L nonempty; with n = 2 both nodes are leaves
    if n > 0 && in_left.iter().all(|&b| b) {
        in_left[tree.root()] = false;
    }
    let mut cut_value = 0;
    for up in session.pass() {
        if in_left[up.u] != in_left[up.v] {
            cut_value = (cut_value as i64 + up.sign as i64) as usize;
        }
    }
    let left = (0..n).filter(|&x| in_left[x]).collect();
    let right = (0..n).filter(|&x| !in_left[x]).collect();
    Ok(CutResult { left, right, cut_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, Generator};

    #[test]
    fn star_and_path() {
        let s = generate(&Generator::Star(9), 0).unwrap();
        assert_eq!(approx_mlst(&mut StreamSession::new(&s), 0.9, 0).unwrap().leaf_count(), 8);
        let p = generate(&Generator::Path(9), 0).unwrap();
        assert_eq!(approx_mlst(&mut StreamSession::new(&p), 0.9, 0).unwrap().leaf_count(), 2);
    }

    #[test]
    fn cycle_cut_keeps_right_connected() {
        let s = generate(&Generator::Cycle(6), 0).unwrap();
        let g = s.materialize().unwrap();
        for seed in 0..10 {
            let mut session = StreamSession::new(&s);
            let cut = connected_max_cut(&mut session, 0.9, seed).unwrap();
            assert_eq!(session.passes(), 2);
            assert!(cut.left.len() <= 2);
            assert!(g.set_is_connected(&cut.right));
        }
        let star = generate(&Generator::Star(5), 0).unwrap();
        assert!(matches!(connected_max_cut(&mut StreamSession::new(&star), 0.9, 0), Err(Error::Domain(_))));
    }
}
