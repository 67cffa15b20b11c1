use std::collections::VecDeque;

use crate::dfs::{MaximalPathsInstance, OutputPath};
use crate::error::Result;
use crate::graph::{AdjacencyGraph, Node};
use crate::tree::RootedTree;

/// BFS distances from every source: `table[i][x]` = dist(sources[i], x).
pub fn exact_distances(g: &AdjacencyGraph, sources: &[Node]) -> Vec<Vec<Option<usize>>> {
    sources
        .iter()
        .map(|&s| {
            let mut dist = vec![None; g.n()];
            dist[s] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in g.neighbors(x) {
                    if dist[y].is_none() {
                        dist[y] = Some(dist[x].unwrap() + 1);
                        queue.push_back(y);
                    }
                }
            }
            dist
        })
        .collect()
}

/// All-pairs distances by Floyd-Warshall, an independent cross-check.
pub fn floyd_warshall(g: &AdjacencyGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for x in 0..n {
        d[x][x] = 0;
        for &y in g.neighbors(x) {
            d[x][y] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter().map(|row| row.into_iter().map(|x| (x < inf).then_some(x)).collect()).collect()
}

fn tree_in_graph(g: &AdjacencyGraph, t: &RootedTree) -> bool {
    t.n() == g.n() && (0..t.n()).all(|x| t.parent(x).is_none_or(|p| g.has_edge(p, x)))
}

/// `t` is a BFS tree of `g`: parent edges exist and depths are distances.
pub fn is_bfs_tree(g: &AdjacencyGraph, t: &RootedTree) -> bool {
    let dist = &exact_distances(g, &[t.root()])[0];
    tree_in_graph(g, t) && (0..g.n()).all(|x| dist[x] == Some(t.depth(x)))
}

/// `t` is a DFS tree of `g`: it spans `g` and every edge of `g` joins an
/// ancestor and a descendant.
pub fn is_dfs_tree(g: &AdjacencyGraph, t: &RootedTree) -> bool {
    if !tree_in_graph(g, t) {
        return false;
    }
    let n = g.n();
    let mut children = vec![Vec::new(); n];
    for x in 0..n {
        if let Some(p) = t.parent(x) {
            children[p].push(x);
        }
    }
    let (mut tin, mut tout) = (vec![0; n], vec![0; n]);
    let mut clock = 0;
    let mut stack = vec![(t.root(), 0usize)];
    tin[t.root()] = 0;
    while let Some(&mut (x, ref mut i)) = stack.last_mut() {
        if *i < children[x].len() {
            let c = children[x][*i];
            *i += 1;
            clock += 1;
            tin[c] = clock;
            stack.push((c, 0));
        } else {
            tout[x] = clock;
            stack.pop();
        }
    }
    let ancestor = |a: Node, b: Node| tin[a] <= tin[b] && tout[b] <= tout[a];
    g.edges().all(|e| ancestor(e.u, e.v) || ancestor(e.v, e.u))
}

/// Textbook DFS from `r`, smallest neighbour first.
pub fn reference_dfs(g: &AdjacencyGraph, r: Node) -> Result<RootedTree> {
    let n = g.n();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[r] = true;
    let mut stack = vec![(r, 0usize)];
    while let Some(&mut (x, ref mut i)) = stack.last_mut() {
        if let Some(&y) = g.neighbors(x).get(*i) {
            *i += 1;
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(x);
                stack.push((y, 0));
            }
        } else {
            stack.pop();
        }
    }
    RootedTree::from_parents(r, parent)
}

/// Structural check of MaximalPaths output: each path is a prefix of its
/// input path followed by fresh nodes and ends at a sink; paths are
/// node-disjoint, use each input at most once and each sink group at most
/// once.
pub fn output_well_formed(g: &AdjacencyGraph, inst: &MaximalPathsInstance, out: &[OutputPath]) -> bool {
    let n = inst.n;
    let mut on_input = vec![false; n];
    for p in &inst.paths {
        for &x in p {
            on_input[x] = true;
        }
    }
    let mut used = vec![false; n];
    let mut inputs = vec![false; inst.paths.len()];
    let mut groups = vec![false; inst.groups()];
    for o in out {
        let Some(src) = inst.paths.get(o.input) else { return false };
        if o.prefix == 0 || o.prefix > src.len() || o.nodes.len() <= o.prefix || o.nodes[..o.prefix] != src[..o.prefix] {
            return false;
        }
        if std::mem::replace(&mut inputs[o.input], true) {
            return false;
        }
        let last = *o.nodes.last().unwrap();
        let Some(group) = inst.sink_group[last] else { return false };
        if std::mem::replace(&mut groups[group], true) {
            return false;
        }
        for (i, &x) in o.nodes.iter().enumerate() {
            if x >= n || std::mem::replace(&mut used[x], true) || inst.excluded[x] {
                return false;
            }
            if i > 0 && !g.has_edge(o.nodes[i - 1], x) {
                return false;
            }
            let fresh = i >= o.prefix && i + 1 < o.nodes.len();
            if fresh && (on_input[x] || inst.sink_group[x].is_some()) {
                return false;
            }
        }
    }
    true
}

/// Maximality: no input-path node outside the output reaches a sink of an
/// unused group through nodes that are neither on input paths, sinks,
/// excluded, nor on output paths.
pub fn maximality_check(g: &AdjacencyGraph, inst: &MaximalPathsInstance, out: &[OutputPath]) -> bool {
    let n = inst.n;
    let mut in_out = vec![false; n];
    let mut used_group = vec![false; inst.groups()];
    for o in out {
        for &x in &o.nodes {
            in_out[x] = true;
        }
        if let Some(gr) = o.nodes.last().and_then(|&t| inst.sink_group[t]) {
            used_group[gr] = true;
        }
    }
    let mut on_input = vec![false; n];
    for p in &inst.paths {
        for &x in p {
            on_input[x] = true;
        }
    }
    let passable = |x: Node| !on_input[x] && inst.sink_group[x].is_none() && !inst.excluded[x] && !in_out[x];
    let live_sink = |x: Node| inst.sink_group[x].is_some_and(|gr| !used_group[gr]) && !inst.excluded[x];
    // multi-source search from every uncovered input node
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for p in &inst.paths {
        for &x in p {
            if !in_out[x] {
                seen[x] = true;
                queue.push_back(x);
            }
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if live_sink(y) {
                return false;
            }
            if !seen[y] && passable(y) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_graph, Generator};

    #[test]
    fn dfs_checks() {
        let p = generate_graph(&Generator::Path(5), 0).unwrap();
        assert!(is_dfs_tree(&p, &reference_dfs(&p, 0).unwrap()));
        let c4 = generate_graph(&Generator::Cycle(4), 0).unwrap();
        for r in 0..4 {
            let bfs = RootedTree::from_parents(r, {
                let d = exact_distances(&c4, &[r]).remove(0);
                (0..4).map(|x| c4.neighbors(x).iter().copied().find(|&y| d[y].unwrap() + 1 == d[x].unwrap())).collect()
            })
            .unwrap();
            assert!(is_bfs_tree(&c4, &bfs));
            assert!(!is_dfs_tree(&c4, &bfs));
        }
    }

    #[test]
    fn truncated_output_is_not_maximal() {
        // source 0 - 1 - sink 2
        let g = generate_graph(&Generator::Path(3), 0).unwrap();
        let inst = MaximalPathsInstance::new(3, vec![vec![0]], &[vec![2]]);
        assert!(!maximality_check(&g, &inst, &[]));
        let full = OutputPath { input: 0, prefix: 1, nodes: vec![0, 1, 2] };
        assert!(output_well_formed(&g, &inst, std::slice::from_ref(&full)));
        assert!(maximality_check(&g, &inst, &[full]));
    }
}
