use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Edge, Node};

/// A spanning tree given by parent pointers, with depths cached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedTree {
    root: Node,
    parent: Vec<Option<Node>>,
    depth: Vec<usize>,
}

impl RootedTree {
    /// Validates that `parent` describes one tree over all nodes rooted at `root`.
    pub fn from_parents(root: Node, parent: Vec<Option<Node>>) -> Result<Self> {
        let n = parent.len();
        if root >= n {
            return Err(Error::Contract(format!("root {root} out of range")));
        }
        if parent[root].is_some() {
            return Err(Error::Contract("root has a parent".into()));
        }
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        // Resolve depths iteratively; a chain longer than n means a cycle.
        for start in 0..n {
            let mut chain = Vec::new();
            let mut x = start;
            while depth[x] == usize::MAX {
                chain.push(x);
                if chain.len() > n {
                    return Err(Error::Contract("parent pointers contain a cycle".into()));
                }
                x = match parent[x] {
                    Some(p) if p < n => p,
                    Some(p) => return Err(Error::Contract(format!("parent {p} out of range"))),
                    None => return Err(Error::Contract(format!("node {x} is a second root"))),
                };
            }
            let mut d = depth[x];
            for &y in chain.iter().rev() {
                d += 1;
                depth[y] = d;
            }
        }
        Ok(RootedTree { root, parent, depth })
    }

    /// BFS-style tree from a list of undirected edges forming a spanning tree.
    pub fn from_edges(n: usize, root: Node, edges: &[Edge]) -> Result<Self> {
        if edges.len() + 1 != n {
            return Err(Error::Contract(format!("{} edges cannot span {n} nodes", edges.len())));
        }
        let g = AdjacencyGraph::from_edges(n, edges.iter().copied())?;
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Contract("edges do not span a tree".into()));
        }
        Self::from_parents(root, parent)
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> Node {
        self.root
    }

    pub fn parent(&self, x: Node) -> Option<Node> {
        self.parent[x]
    }

    pub fn parents(&self) -> &[Option<Node>] {
        &self.parent
    }

    pub fn depth(&self, x: Node) -> usize {
        self.depth[x]
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(x, p)| p.map(|p| Edge::new(x, p)))
            .collect()
    }

    pub fn children(&self) -> Vec<Vec<Node>> {
        let mut ch = vec![Vec::new(); self.n()];
        for (x, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(x);
            }
        }
        ch
    }

    /// Degree of each node in the tree viewed as an undirected graph.
    pub fn tree_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for (x, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                deg[x] += 1;
                deg[*p] += 1;
            }
        }
        deg
    }

    /// Nodes of tree degree one (the root counts when it has a single child).
    pub fn leaves(&self) -> Vec<Node> {
        self.tree_degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 1)
            .map(|(x, _)| x)
            .collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.tree_degrees().iter().filter(|&&d| d == 1).count()
    }

    /// Nodes on the path from `x` up to the root, `x` first.
    pub fn path_to_root(&self, mut x: Node) -> Vec<Node> {
        let mut path = vec![x];
        while let Some(p) = self.parent[x] {
            path.push(p);
            x = p;
        }
        path
    }

    /// Checks that every parent link is an edge of `g` and the node counts agree.
    pub fn check_spans(&self, g: &AdjacencyGraph) -> Result<()> {
        if g.n() != self.n() {
            return Err(Error::Contract(format!("tree has {} nodes, graph {}", self.n(), g.n())));
        }
        for (x, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                if !g.has_edge(x, *p) {
                    return Err(Error::Contract(format!("tree edge ({x},{p}) not in graph")));
                }
            }
        }
        Ok(())
    }

    /// Preorder index of every node, visiting children in increasing id order.
    pub fn preorder(&self) -> Vec<usize> {
        let children = self.children();
        let mut order = vec![0; self.n()];
        let mut next = 0;
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            order[x] = next;
            next += 1;
            for &c in children[x].iter().rev() {
                stack.push(c);
            }
        }
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_cycles_and_second_roots() {
        assert!(RootedTree::from_parents(0, vec![None, Some(2), Some(1)]).is_err());
        assert!(RootedTree::from_parents(0, vec![None, None]).is_err());
        let t = RootedTree::from_parents(0, vec![None, Some(0), Some(1)]).unwrap();
        assert_eq!(t.depth(2), 2);
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.path_to_root(2), vec![2, 1, 0]);
    }

    #[test]
    fn star_leaves() {
        let t = RootedTree::from_parents(0, vec![None, Some(0), Some(0), Some(0)]).unwrap();
        assert_eq!(t.leaves(), vec![1, 2, 3]);
        assert_eq!(t.preorder(), vec![0, 1, 2, 3]);
    }
}
