//! In-memory 2-approximation for max-leaf spanning trees: grow a maximal
//! leafy forest with the expansion rules, then join it into a spanning tree.

use super::dead_leaf::dead_leaf_tree;
use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Edge, Node, UnionFind};
use crate::tree::RootedTree;

struct Forest<'g> {
    g: &'g AdjacencyGraph,
    in_f: Vec<bool>,
    edges: Vec<Edge>,
}

impl Forest<'_> {
    fn outside(&self, x: Node) -> Vec<Node> {
        self.g.neighbors(x).iter().copied().filter(|&y| !self.in_f[y]).collect()
    }

    fn attach_all(&mut self, x: Node, leaves: &mut Vec<Node>) {
        for y in self.outside(x) {
            self.in_f[y] = true;
            self.edges.push(Edge::new(x, y));
            leaves.push(y);
        }
    }

    /// Grows one tree from `v` until neither rule applies to its leaves.
    fn grow(&mut self, v: Node) {
        self.in_f[v] = true;
        let mut leaves = Vec::new();
        self.attach_all(v, &mut leaves);
        loop {
            leaves.sort_unstable();
            // rule 1: a leaf with two or more neighbours outside the forest
            if let Some(i) = leaves.iter().position(|&x| self.outside(x).len() >= 2) {
                let x = leaves.remove(i);
                self.attach_all(x, &mut leaves);
                continue;
            }
            // rule 2: a leaf whose single outside neighbour has two or more
            let rule2 = leaves.iter().enumerate().find_map(|(i, &x)| {
                let out = self.outside(x);
                (out.len() == 1 && self.outside(out[0]).len() >= 2).then(|| (i, x, out[0]))
            });
            let Some((i, x, y)) = rule2 else { break };
            leaves.remove(i);
            self.in_f[y] = true;
            self.edges.push(Edge::new(x, y));
            self.attach_all(y, &mut leaves);
        }
    }
}

fn leafy_forest_tree(g: &AdjacencyGraph) -> Result<RootedTree> {
    let n = g.n();
    let mut f = Forest { g, in_f: vec![false; n], edges: Vec::new() };
    while let Some(v) = (0..n).find(|&v| !f.in_f[v] && f.outside(v).len() >= 3) {
        f.grow(v);
    }
    // join: forest edges, then edges hanging a leftover node, then the rest
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    let hanging = g.edges().filter(|e| f.in_f[e.u] != f.in_f[e.v]);
    let rest = g.edges().filter(|e| f.in_f[e.u] == f.in_f[e.v]);
    for e in f.edges.iter().copied().chain(hanging).chain(rest) {
        if uf.union(e.u, e.v) {
            tree.push(e);
        }
    }
    if tree.len() + 1 != n {
        return Err(Error::Domain("graph is not connected".into()));
    }
    RootedTree::from_edges(n, 0, &tree)
}

/// Spanning tree of `g` with at least leaf(g)/2 leaves. The dead-leaf tree
/// from a maximum degree node is also tried and the leafier one kept.
pub fn leafy_spanning_tree(g: &AdjacencyGraph) -> Result<RootedTree> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Parameter("empty graph".into()));
    }
    if n == 1 {
        return RootedTree::from_parents(0, vec![None]);
    }
    let best = leafy_forest_tree(g)?;
    let hub = (0..n).max_by_key(|&x| (g.degree(x), std::cmp::Reverse(x))).unwrap();
    let other = dead_leaf_tree(g, hub)?;
    Ok(if other.leaf_count() > best.leaf_count() { other } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_graph, Generator};
    use crate::oracle::exact_leaf;

    #[test]
    fn factor_two_on_small_graphs() {
        for seed in 0..15 {
            let g = generate_graph(&Generator::Gnp { n: 11, p: 0.3 }, seed).unwrap();
            let t = leafy_spanning_tree(&g).unwrap();
            t.check_spans(&g).unwrap();
            assert!(2 * t.leaf_count() >= exact_leaf(&g).unwrap());
        }
        let p = generate_graph(&Generator::Petersen, 0).unwrap();
        assert!(leafy_spanning_tree(&p).unwrap().leaf_count() >= 3);
    }
}
