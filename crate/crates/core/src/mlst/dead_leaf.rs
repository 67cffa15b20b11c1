//! The dead-leaf tree: grows a spanning tree by repeated leaf expansion
//! with a fixed operation priority, which guarantees at least
//! (n - inode(G)) / 10 leaves.

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Node};
use crate::tree::RootedTree;

/// Nodes of degree two whose neighbours both have degree two.
pub fn count_inodes(g: &AdjacencyGraph) -> usize {
    (0..g.n())
        .filter(|&x| g.degree(x) == 2 && g.neighbors(x).iter().all(|&y| g.degree(y) == 2))
        .count()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OperationCounts {
    pub op1: usize,
    pub op2: usize,
    pub op3: usize,
}

struct Growth<'g> {
    g: &'g AdjacencyGraph,
    parent: Vec<Option<Node>>,
    in_tree: Vec<bool>,
    expanded: Vec<bool>,
    size: usize,
}

impl Growth<'_> {
    fn outside(&self, x: Node) -> usize {
        self.g.neighbors(x).iter().filter(|&&y| !self.in_tree[y]).count()
    }

    fn is_leaf(&self, x: Node) -> bool {
        self.in_tree[x] && !self.expanded[x]
    }

    fn expand(&mut self, x: Node) {
        debug_assert!(self.is_leaf(x));
        self.expanded[x] = true;
        for &y in self.g.neighbors(x) {
            if !self.in_tree[y] {
                self.in_tree[y] = true;
                self.parent[y] = Some(x);
                self.size += 1;
            }
        }
    }

    /// No node outside the tree touches an expanded node.
    fn audit(&self) -> Result<()> {
        for x in 0..self.g.n() {
            if self.expanded[x] && self.outside(x) > 0 {
                return Err(Error::Contract(format!("expanded node {x} still has a neighbour outside the tree")));
            }
        }
        Ok(())
    }
}

/// Dead-leaf tree rooted at `s`. With `audit`, the structural invariant is
/// checked after every expansion.
pub fn dead_leaf_tree_traced(g: &AdjacencyGraph, s: Node, audit: bool) -> Result<(RootedTree, OperationCounts)> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Domain("the dead-leaf construction excludes the singleton graph".into()));
    }
    if s >= n {
        return Err(Error::Parameter(format!("root {s} out of range")));
    }
    if !g.is_connected() {
        return Err(Error::Domain("graph is not connected".into()));
    }
    let mut t = Growth { g, parent: vec![None; n], in_tree: vec![false; n], expanded: vec![false; n], size: 1 };
    t.in_tree[s] = true;
    t.expand(s);
    let mut ops = OperationCounts::default();
    let check = |t: &Growth| if audit { t.audit() } else { Ok(()) };
    check(&t)?;
    while t.size < n {
        // Operation 1: a leaf with two or more outside neighbours.
        if let Some(x) = (0..n).find(|&x| t.is_leaf(x) && t.outside(x) >= 2) {
            t.expand(x);
            ops.op1 += 1;
            check(&t)?;
            continue;
        }
        // Operation 2: an outside node with two or more tree neighbours
        // (all of them leaves, by the invariant).
        let op2 = (0..n).find_map(|y| {
            if t.in_tree[y] {
                return None;
            }
            let inside: Vec<Node> = g.neighbors(y).iter().copied().filter(|&z| t.in_tree[z]).collect();
            (inside.len() >= 2).then(|| inside[0])
        });
        if let Some(x) = op2 {
            t.expand(x);
            ops.op2 += 1;
            check(&t)?;
            continue;
        }
        // Operation 3: follow the degree-two chain out of the lowest leaf
        // with exactly one outside neighbour.
        let x0 = (0..n)
            .find(|&x| t.is_leaf(x) && t.outside(x) == 1)
            .ok_or_else(|| Error::Contract("no operation applies to a non-spanning tree".into()))?;
        let x1 = g.neighbors(x0).iter().copied().find(|&y| !t.in_tree[y]).unwrap();
        let mut chain = vec![x0, x1];
        loop {
            let (prev, cur) = (chain[chain.len() - 2], chain[chain.len() - 1]);
            let others: Vec<Node> = g.neighbors(cur).iter().copied().filter(|&y| y != prev).collect();
            let free = others.iter().all(|&y| !t.in_tree[y]);
            if !(free && g.degree(cur) == 2) || chain.contains(&others[0]) {
                break;
            }
            chain.push(others[0]);
        }
        for &x in &chain {
            if t.is_leaf(x) {
                t.expand(x);
                check(&t)?;
            }
        }
        ops.op3 += 1;
    }
    Ok((RootedTree::from_parents(s, t.parent)?, ops))
}

pub fn dead_leaf_tree(g: &AdjacencyGraph, s: Node) -> Result<RootedTree> {
    dead_leaf_tree_traced(g, s, false).map(|(t, _)| t)
}

/// The guaranteed leaf count, ceil((n - inode) / 10).
pub fn dead_leaf_bound(g: &AdjacencyGraph) -> usize {
    (g.n() - count_inodes(g)).div_ceil(10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_graph, Generator};

    #[test]
    fn inode_closed_forms() {
        assert_eq!(count_inodes(&generate_graph(&Generator::Cycle(8), 0).unwrap()), 8);
        assert_eq!(count_inodes(&generate_graph(&Generator::Path(5), 0).unwrap()), 1);
        assert_eq!(count_inodes(&generate_graph(&Generator::Complete(4), 0).unwrap()), 0);
    }

    #[test]
    fn fixtures() {
        let star = generate_graph(&Generator::Star(6), 0).unwrap();
        assert_eq!(dead_leaf_tree(&star, 0).unwrap().leaf_count(), 5);
        let cycle = generate_graph(&Generator::Cycle(8), 0).unwrap();
        assert_eq!(dead_leaf_tree(&cycle, 0).unwrap().leaf_count(), 2);
        let single = AdjacencyGraph::empty(1);
        assert!(matches!(dead_leaf_tree(&single, 0), Err(Error::Domain(_))));
    }
}
