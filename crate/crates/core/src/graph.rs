//! In-memory graph types shared by the algorithms and the oracles.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Node = usize;

/// Undirected edge stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: Node,
    pub v: Node,
}

impl Edge {
    pub fn new(a: Node, b: Node) -> Self {
        if a <= b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn other(&self, x: Node) -> Node {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    /// Index in the `n*n` edge-incidence universe.
    pub fn index(&self, n: usize) -> u64 {
        (self.u as u64) * (n as u64) + self.v as u64
    }

    pub fn from_index(index: u64, n: usize) -> Self {
        Edge { u: (index / n as u64) as Node, v: (index % n as u64) as Node }
    }
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    n: usize,
    adj: Vec<Vec<Node>>,
}

impl AdjacencyGraph {
    pub fn empty(n: usize) -> Self {
        AdjacencyGraph { n, adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list. Self-loops, duplicates and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for e in edges {
            if e.u == e.v {
                return Err(Error::MalformedStream(format!("self-loop at node {}", e.u)));
            }
            if e.v >= n {
                return Err(Error::MalformedStream(format!("node {} out of range (n = {n})", e.v)));
            }
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for (x, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedStream(format!("duplicate edge at node {x}")));
            }
        }
        Ok(AdjacencyGraph { n, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, x: Node) -> &[Node] {
        &self.adj[x]
    }

    pub fn degree(&self, x: Node) -> usize {
        self.adj[x].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: Node, b: Node) -> bool {
        a < self.n && self.adj[a].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| Edge { u, v }))
    }

    pub fn is_regular(&self) -> Option<usize> {
        let d = self.adj.first().map(Vec::len)?;
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    /// BFS distances from `s`; `None` for unreachable nodes.
    pub fn bfs(&self, s: Node) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::from([s]);
        dist[s] = Some(0);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            for &y in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Component label per node (labels are dense, in order of smallest member).
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in &self.adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().iter().all(|&c| c == 0)
    }

    /// Subgraph on the same node set keeping edges whose endpoints both satisfy `keep`.
    pub fn induced(&self, keep: impl Fn(Node) -> bool) -> AdjacencyGraph {
        let adj = self
            .adj
            .iter()
            .enumerate()
            .map(|(x, list)| {
                if keep(x) {
                    list.iter().copied().filter(|&y| keep(y)).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        AdjacencyGraph { n: self.n, adj }
    }

    /// Whether `set` is nonempty and induces a connected subgraph.
    pub fn set_is_connected(&self, set: &[Node]) -> bool {
        let mut inside = vec![false; self.n];
        for &x in set {
            inside[x] = true;
        }
        let Some(&start) = set.first() else { return false };
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if inside[y] && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == inside.iter().filter(|&&b| b).count()
    }

    pub fn is_subgraph_of(&self, other: &AdjacencyGraph) -> bool {
        self.n == other.n && self.edges().all(|e| other.has_edge(e.u, e.v))
    }
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_loops() {
        assert!(AdjacencyGraph::from_edges(3, [Edge::new(0, 1), Edge::new(1, 0)]).is_err());
        assert!(AdjacencyGraph::from_edges(3, [Edge { u: 1, v: 1 }]).is_err());
        assert!(AdjacencyGraph::from_edges(2, [Edge::new(0, 2)]).is_err());
    }

    #[test]
    fn edge_index_roundtrip() {
        let e = Edge::new(7, 3);
        assert_eq!(Edge::from_index(e.index(10), 10), e);
    }

    #[test]
    fn components_and_bfs() {
        let g = AdjacencyGraph::from_edges(5, [Edge::new(0, 1), Edge::new(1, 2), Edge::new(3, 4)]).unwrap();
        assert_eq!(g.components(), vec![0, 0, 0, 1, 1]);
        assert_eq!(g.bfs(0), vec![Some(0), Some(1), Some(2), None, None]);
        assert!(!g.is_connected());
    }
}
