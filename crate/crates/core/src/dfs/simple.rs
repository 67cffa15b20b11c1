//! DFS by layered certificates.
//!
//! Each round takes a (k+1)-vertex-connectivity certificate of every open
//! subproblem, runs an in-memory DFS on it and freezes its top k+1 layers.
//! The subtree below each depth-k node becomes a subproblem of the next
//! round. All subproblems of one round share a single pass.

use std::cell::RefCell;
use std::rc::Rc;

use serde::Serialize;

use super::common::dfs_edges;
use crate::cert::CertBuilder;
use crate::error::{with_retries, Error, Result};
use crate::graph::Node;
use crate::harness::{Hub, Model, PartId, StreamSession};
use crate::rng::derive;
use crate::tree::RootedTree;

/// One subproblem: its nodes and the DFS tree found on its certificate,
/// both in global ids.
#[derive(Debug, Clone, Serialize)]
pub struct SimpleLevel {
    pub round: usize,
    pub root: Node,
    pub nodes: Vec<Node>,
    pub parent: Vec<Option<Node>>,
    pub depth: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DfsSimpleResult {
    #[serde(skip)]
    pub tree: RootedTree,
    pub k: usize,
    pub rounds: usize,
    pub passes: usize,
    pub levels: Vec<SimpleLevel>,
}

struct Shared {
    k: usize,
    seed: u64,
    parent: RefCell<Vec<Option<Node>>>,
    levels: RefCell<Vec<SimpleLevel>>,
}

async fn solve(hub: Rc<Hub>, part: PartId, nodes: Vec<Node>, root: usize, round: usize, sh: Rc<Shared>) -> Result<()> {
    let n = nodes.len();
    if n == 1 {
        return Ok(());
    }
    let k = sh.k;
    let seed = derive(sh.seed, "simple-cert", nodes[root] as u64 * 1_000_003 + round as u64);
    let cert = hub.pass(part, CertBuilder::new(hub.model(), n, k + 1, seed, None)).await.finish()?;
    let (parent, depth) = dfs_edges(n, &cert.edges, root);
    if depth.iter().any(Option::is_none) {
        return Err(match hub.model() {
            Model::InsertionOnly => Error::Domain("graph is not connected".into()),
            Model::Turnstile => Error::Retryable("certificate does not span the subproblem".into()),
        });
    }
    let depth: Vec<usize> = depth.into_iter().map(Option::unwrap).collect();
    {
        let mut out = sh.parent.borrow_mut();
        for x in 0..n {
            if x != root && depth[x] <= k {
                out[nodes[x]] = parent[x].map(|p| nodes[p]);
            }
        }
    }
    sh.levels.borrow_mut().push(SimpleLevel {
        round,
        root: nodes[root],
        nodes: nodes.clone(),
        parent: parent.iter().map(|p| p.map(|p| nodes[p])).collect(),
        depth: depth.clone(),
    });
    // the depth-k ancestor of every deeper node
    let mut anchor: Vec<Option<usize>> = vec![None; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| depth[x]);
    for &x in &order {
        anchor[x] = match depth[x].cmp(&k) {
            std::cmp::Ordering::Less => None,
            std::cmp::Ordering::Equal => Some(x),
            std::cmp::Ordering::Greater => anchor[parent[x].unwrap()],
        };
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &x in &order {
        if let Some(a) = anchor[x] {
            groups[a].push(x);
        }
    }
    let mut frozen = Vec::new();
    for x in 0..n {
        if depth[x] < k || (depth[x] == k && groups[x].len() == 1) {
            frozen.push(nodes[x]);
        }
    }
    hub.retire(&frozen);
    for group in groups.into_iter().filter(|g| g.len() > 1) {
        // the anchor comes first in depth order
        let sub: Vec<Node> = group.iter().map(|&x| nodes[x]).collect();
        let p = hub.new_part(&sub);
        hub.spawn(solve(hub.clone(), p, sub, 0, round + 1, sh.clone()));
    }
    Ok(())
}

/// DFS tree of a connected graph rooted at `r`, using about ceil(h/k)
/// passes where h is the height of the tree found.
pub fn dfs_simple(session: &mut StreamSession<'_>, r: Node, k: usize, seed: u64) -> Result<DfsSimpleResult> {
    let n = session.n();
    if r >= n {
        return Err(Error::Parameter(format!("root {r} out of range")));
    }
    if k == 0 {
        return Err(Error::Parameter("k must be positive".into()));
    }
    let start = session.passes();
    with_retries(seed, 5, |seed| {
        let sh = Rc::new(Shared { k, seed, parent: RefCell::new(vec![None; n]), levels: RefCell::new(Vec::new()) });
        let hub = Hub::new(n, session.model());
        let nodes: Vec<Node> = (0..n).collect();
        Hub::run(&hub, session, solve(hub.clone(), 0, nodes, r, 0, sh.clone()))?;
        let parent = sh.parent.borrow().clone();
        let tree = RootedTree::from_parents(r, parent)?;
        let levels = std::mem::take(&mut *sh.levels.borrow_mut());
        let rounds = levels.iter().map(|l| l.round + 1).max().unwrap_or(0);
        Ok(DfsSimpleResult { tree, k, rounds, passes: session.passes() - start, levels })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, Generator};
    use crate::oracle::is_dfs_tree;

    #[test]
    fn path_and_random() {
        let s = generate(&Generator::Path(20), 0).unwrap();
        let g = s.materialize().unwrap();
        for k in [1, 3, 7, 30] {
            let out = dfs_simple(&mut StreamSession::new(&s), 0, k, 1).unwrap();
            assert!(is_dfs_tree(&g, &out.tree));
            assert!(out.passes <= 19usize.div_ceil(k) + 1, "k={k} passes={}", out.passes);
        }
        let s = generate(&Generator::Gnp { n: 40, p: 0.15 }, 3).unwrap();
        let g = s.materialize().unwrap();
        for stream in [s.clone(), s.with_churn(4, 30).unwrap()] {
            let out = dfs_simple(&mut StreamSession::new(&stream), 5, 4, 2).unwrap();
            assert!(is_dfs_tree(&g, &out.tree));
        }
    }
}
