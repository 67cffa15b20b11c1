use super::centers::{multi_bfs, BfsConfig};
use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Edge, Node};
use crate::harness::StreamSession;

/// Steiner tree within twice the optimum: BFS trees from every terminal
/// give the metric closure, whose MST is unfolded into shortest paths and
/// pruned to a tree whose leaves are terminals.
pub fn steiner_2approx(session: &mut StreamSession<'_>, terminals: &[Node], cfg: &BfsConfig) -> Result<Vec<Edge>> {
    let n = session.n();
    let mut t = terminals.to_vec();
    t.sort_unstable();
    t.dedup();
    if t.iter().any(|&x| x >= n) {
        return Err(Error::Parameter("terminal out of range".into()));
    }
    if t.len() <= 1 {
        return Ok(Vec::new());
    }
    let m = multi_bfs(session, &t, &BfsConfig { k: cfg.k.max(t.len()).min(n), ..*cfg })?;
    let c = t.len();
    let dist = |i: usize, j: usize| m.table.dist[i][t[j]].unwrap();
    // Prim on the terminal closure
    let mut in_tree = vec![false; c];
    let mut best: Vec<(usize, usize)> = (0..c).map(|j| (dist(0, j), 0)).collect();
    in_tree[0] = true;
    let mut union = Vec::new();
    for _ in 1..c {
        let j = (0..c).filter(|&j| !in_tree[j]).min_by_key(|&j| (best[j].0, j)).unwrap();
        in_tree[j] = true;
        // walk from t[j] up the BFS tree of the attaching terminal
        let i = best[j].1;
        let mut x = t[j];
        while let Some(p) = m.parents[i][x] {
            union.push(Edge::new(p, x));
            x = p;
        }
        for k in 0..c {
            if !in_tree[k] && dist(j, k) < best[k].0 {
                best[k] = (dist(j, k), j);
            }
        }
    }
    union.sort_unstable();
    union.dedup();
    let h = AdjacencyGraph::from_edges(n, union.iter().copied())?;
    // spanning tree of the union, then strip non-terminal leaves
    let root = t[0];
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut stack = vec![root];
    let mut reached = Vec::new();
    while let Some(x) = stack.pop() {
        reached.push(x);
        for &y in h.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(x);
                stack.push(y);
            }
        }
    }
    let mut children = vec![0usize; n];
    for &x in &reached {
        if let Some(p) = parent[x] {
            children[p] += 1;
        }
    }
    let terminal = |x: Node| t.binary_search(&x).is_ok();
    let mut alive = seen.clone();
    let mut leaves: Vec<Node> = reached.iter().copied().filter(|&x| children[x] == 0 && !terminal(x)).collect();
    while let Some(x) = leaves.pop() {
        alive[x] = false;
        if let Some(p) = parent[x] {
            children[p] -= 1;
            if children[p] == 0 && !terminal(p) {
                leaves.push(p);
            }
        }
    }
    let mut edges: Vec<Edge> = reached.iter().filter(|&&x| alive[x]).filter_map(|&x| parent[x].map(|p| Edge::new(p, x))).collect();
    edges.sort_unstable();
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::with_retries;
    use crate::harness::{generate, Generator};

    #[test]
    fn two_terminals_give_a_shortest_path() {
        let st = generate(&Generator::Cycle(10), 0).unwrap();
        let e = with_retries(0, 5, |seed| steiner_2approx(&mut StreamSession::new(&st), &[0, 3], &BfsConfig::new(4, seed))).unwrap();
        assert_eq!(e.len(), 3);
        let all: Vec<Node> = (0..10).collect();
        let e = with_retries(0, 5, |seed| steiner_2approx(&mut StreamSession::new(&st), &all, &BfsConfig::new(10, seed))).unwrap();
        assert_eq!(e.len(), 9);
    }
}
