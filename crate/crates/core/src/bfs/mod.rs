//! BFS trees under pass/space tradeoffs, plus the diameter and Steiner
//! tree applications.

mod centers;
mod deterministic;
mod diameter;
mod steiner;

pub use centers::{bfs_randomized, multi_bfs, pairwise_distances, radius, BfsConfig, BfsStats, MultiBfs, Schedule};
pub use deterministic::bfs_deterministic;
pub use diameter::{diameter_approx, DiameterResult};
pub use steiner::steiner_2approx;

use serde::Serialize;

use crate::error::Result;
use crate::graph::{AdjacencyGraph, Node};
use crate::tree::RootedTree;

/// Distances from each source to each target; `None` is unreachable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceTable {
    pub sources: Vec<Node>,
    pub targets: Vec<Node>,
    /// `dist[i][j]` = dist(sources[i], targets[j]).
    pub dist: Vec<Vec<Option<usize>>>,
}

impl DistanceTable {
    pub fn get(&self, source: Node, target: Node) -> Option<usize> {
        let i = self.sources.iter().position(|&s| s == source)?;
        let j = self.targets.iter().position(|&t| t == target)?;
        self.dist[i][j]
    }

    /// `source,node,dist` rows; unreachable pairs print `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("source,node,dist\n");
        for (i, &s) in self.sources.iter().enumerate() {
            for (j, &t) in self.targets.iter().enumerate() {
                match self.dist[i][j] {
                    Some(d) => out.push_str(&format!("{s},{t},{d}\n")),
                    None => out.push_str(&format!("{s},{t},inf\n")),
                }
            }
        }
        out
    }
}

/// A single-source BFS result. `parent` is filled for every reached node
/// other than the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BfsResult {
    pub root: Node,
    pub dist: Vec<Option<usize>>,
    pub parent: Vec<Option<Node>>,
    pub passes: usize,
}

impl BfsResult {
    /// Whether every node was reached.
    pub fn is_complete(&self) -> bool {
        self.dist.iter().all(Option::is_some)
    }

    pub fn tree(&self) -> Result<RootedTree> {
        RootedTree::from_parents(self.root, self.parent.clone())
    }

    pub fn table(&self) -> DistanceTable {
        DistanceTable { sources: vec![self.root], targets: (0..self.dist.len()).collect(), dist: vec![self.dist.clone()] }
    }
}

/// Largest degree sum along a root-to-leaf path of `t`.
pub fn max_path_degree_sum(g: &AdjacencyGraph, t: &RootedTree) -> usize {
    let mut sum = vec![0usize; t.n()];
    let mut best = 0;
    let mut order: Vec<Node> = (0..t.n()).collect();
    order.sort_by_key(|&x| t.depth(x));
    for x in order {
        sum[x] = g.degree(x) + t.parent(x).map_or(0, |p| sum[p]);
        best = best.max(sum[x]);
    }
    best
}
