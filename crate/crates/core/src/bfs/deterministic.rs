use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::BfsResult;
use crate::error::{Error, Result};
use crate::graph::Node;
use crate::harness::{Model, StreamSession};

/// Unit-weight relaxation over the stored subgraph, starting from the
/// current labels. Returns whether any label dropped.
fn relax_stored(stored: &[Vec<Node>], dist: &mut [Option<usize>]) -> bool {
    let mut heap: BinaryHeap<Reverse<(usize, Node)>> = (0..dist.len()).filter_map(|x| dist[x].map(|d| Reverse((d, x)))).collect();
    let mut changed = false;
    while let Some(Reverse((d, x))) = heap.pop() {
        if dist[x] != Some(d) {
            continue;
        }
        for &y in &stored[x] {
            if dist[y].is_none_or(|dy| d + 1 < dy) {
                dist[y] = Some(d + 1);
                changed = true;
                heap.push(Reverse((d + 1, y)));
            }
        }
    }
    changed
}

/// Deterministic BFS trading passes for space: the first pass keeps
/// ceil(n/p) neighbours per node, later passes relax stream edges and then
/// the stored ones, until a pass changes nothing. Parents are the smallest
/// id neighbour one level up, collected during that final pass.
pub fn bfs_deterministic(session: &mut StreamSession<'_>, s: Node, p: usize) -> Result<BfsResult> {
    if session.model() != Model::InsertionOnly {
        return Err(Error::Domain("deterministic BFS needs an insertion-only stream".into()));
    }
    let n = session.n();
    if s >= n {
        return Err(Error::Parameter(format!("source {s} out of range")));
    }
    if p == 0 {
        return Err(Error::Parameter("pass target p must be at least 1".into()));
    }
    let start = session.passes();
    let quota = n.div_ceil(p);
    // each node picks up to `quota` edges; a picked edge is usable both ways
    let mut stored: Vec<Vec<Node>> = vec![Vec::new(); n];
    let mut picked = vec![0usize; n];
    let mut dist = vec![None; n];
    dist[s] = Some(0);
    for up in session.pass() {
        let (a, b) = (up.u, up.v);
        if picked[a] < quota || picked[b] < quota {
            for x in [a, b] {
                if picked[x] < quota {
                    picked[x] += 1;
                }
            }
            stored[a].push(b);
            stored[b].push(a);
        }
    }
    session.charge(stored.iter().map(Vec::len).sum::<usize>() + 2 * n)?;
    relax_stored(&stored, &mut dist);
    let mut parent: Vec<Option<Node>>;
    loop {
        parent = vec![None; n];
        let mut changed = false;
        for up in session.pass() {
            for (a, b) in [(up.u, up.v), (up.v, up.u)] {
                if let Some(da) = dist[a] {
                    if dist[b].is_none_or(|db| da + 1 < db) {
                        dist[b] = Some(da + 1);
                        changed = true;
                    }
                    if dist[b] == Some(da + 1) && parent[b].is_none_or(|q| a < q) {
                        parent[b] = Some(a);
                    }
                }
            }
        }
        changed |= relax_stored(&stored, &mut dist);
        if !changed {
            break;
        }
    }
    parent[s] = None;
    Ok(BfsResult { root: s, dist, parent, passes: session.passes() - start })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, Generator};
    use crate::oracle::{exact_distances, is_bfs_tree};

    #[test]
    fn star_takes_two_passes() {
        let st = generate(&Generator::Star(9), 0).unwrap();
        for p in [1, 3, 9] {
            let r = bfs_deterministic(&mut StreamSession::new(&st), 0, p).unwrap();
            assert!(r.dist[1..].iter().all(|&d| d == Some(1)));
            assert_eq!(r.passes, 2);
        }
    }

    #[test]
    fn matches_oracle() {
        let st = generate(&Generator::Gnp { n: 80, p: 0.05 }, 4).unwrap();
        let g = st.materialize().unwrap();
        for p in [1, 4, 80] {
            let r = bfs_deterministic(&mut StreamSession::new(&st), 7, p).unwrap();
            assert_eq!(r.dist, exact_distances(&g, &[7])[0]);
            assert!(is_bfs_tree(&g, &r.tree().unwrap()));
        }
    }

    #[test]
    fn path_from_the_end() {
        let st = generate(&Generator::Path(12), 0).unwrap();
        let r = bfs_deterministic(&mut StreamSession::new(&st), 0, 12).unwrap();
        assert!((0..12).all(|i| r.dist[i] == Some(i)));
    }
}
