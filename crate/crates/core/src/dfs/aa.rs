//! DFS by separators and initial segments.
//!
//! A subproblem (a connected node set C with a root r) finds a set Q of
//! node-disjoint paths whose removal leaves components of at most |C|/2
//! nodes: a maximal matching, shrunk by repeatedly joining the shorter half
//! of the paths to the longer half through MaximalPaths. An initial segment
//! of a DFS tree rooted at r is then grown to cover Q. Each component of
//! the rest hangs below the deepest segment node adjacent to it and is
//! solved recursively; sibling subproblems share passes.

use std::cell::RefCell;
use std::collections::VecDeque;
use std::rc::Rc;

use serde::Serialize;

use super::common::{components, dfs_edges, max_neighbor_labels, EdgeCollector, Labels, MaskedForest};
use super::maximal::maximal_paths_in;
use super::paths::{MaximalPathsInstance, PathSystem};
use crate::error::{with_retries, Error, Result};
use crate::graph::{Edge, Node};
use crate::harness::{Hub, Model, PartId, StreamSession};
use crate::rng::derive;
use crate::sketch::{maximal_matching_in, EdgeFilter};
use crate::tree::RootedTree;

/// Reduce stops once the separator has at most this many paths.
pub const SEPARATOR_TARGET: usize = 11;

/// Record of one non-trivial subproblem.
#[derive(Debug, Clone, Serialize)]
pub struct AaSubproblem {
    pub level: usize,
    pub size: usize,
    pub matching_paths: usize,
    pub separator_paths: usize,
    pub reduce_rounds: usize,
    pub segment_iterations: usize,
    pub largest_component: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DfsAaResult {
    #[serde(skip)]
    pub tree: RootedTree,
    pub k: usize,
    pub s: usize,
    pub passes: usize,
    pub levels: usize,
    pub subproblems: Vec<AaSubproblem>,
}

struct Shared {
    n: usize,
    k: usize,
    s: usize,
    seed: u64,
    parent: RefCell<Vec<Option<Node>>>,
    log: RefCell<Vec<AaSubproblem>>,
}

fn lost(model: Model, what: &str) -> Error {
    match model {
        Model::InsertionOnly => Error::Domain("graph is not connected".into()),
        Model::Turnstile => Error::Retryable(format!("sketch lost {what}")),
    }
}

async fn solve(hub: Rc<Hub>, part: PartId, nodes: Vec<Node>, root: usize, level: usize, sh: Rc<Shared>) -> Result<()> {
    let nc = nodes.len();
    if nc == 1 {
        hub.retire(&nodes);
        return Ok(());
    }
    let seed = derive(sh.seed, "aa", nodes[root] as u64 * 1_000_003 + level as u64);
    if nc * nc <= 2 * sh.n || nc <= 3 {
        let edges = hub.pass(part, EdgeCollector::new()).await.finish();
        let (parent, depth) = dfs_edges(nc, &edges, root);
        if depth.iter().any(Option::is_none) {
            return Err(Error::Domain("graph is not connected".into()));
        }
        let mut out = sh.parent.borrow_mut();
        for x in (0..nc).filter(|&x| x != root) {
            out[nodes[x]] = parent[x].map(|p| nodes[p]);
        }
        hub.retire(&nodes);
        return Ok(());
    }
    hub.add_resident(4 * nc as isize);
    let d = decompose(&hub, part, nc, root, sh.k, sh.s, seed).await?;
    {
        let mut out = sh.parent.borrow_mut();
        for x in (0..nc).filter(|&x| x != root && d.seg.depth[x].is_some()) {
            out[nodes[x]] = d.seg.parent[x].map(|p| nodes[p]);
        }
        for c in &d.components {
            out[nodes[c.entry]] = Some(nodes[c.attach]);
        }
    }
    sh.log.borrow_mut().push(AaSubproblem {
        level,
        size: nc,
        matching_paths: d.matching_paths,
        separator_paths: d.separator.len(),
        reduce_rounds: d.reduce_rounds,
        segment_iterations: d.seg.iterations,
        largest_component: d.components.iter().map(|c| c.nodes.len()).max().unwrap_or(0),
    });
    let segment: Vec<Node> = (0..nc).filter(|&x| d.seg.depth[x].is_some()).map(|x| nodes[x]).collect();
    hub.retire(&segment);
    for c in d.components {
        let sub: Vec<Node> = c.nodes.iter().map(|&x| nodes[x]).collect();
        let sub_root = c.nodes.iter().position(|&x| x == c.entry).unwrap();
        let p = hub.new_part(&sub);
        hub.spawn(solve(hub.clone(), p, sub, sub_root, level + 1, sh.clone()));
    }
    hub.add_resident(-4 * nc as isize);
    Ok(())
}

/// A component left after removing the segment, with the deepest segment
/// node adjacent to it and one of that node's neighbours inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Portal {
    pub nodes: Vec<Node>,
    pub attach: Node,
    pub entry: Node,
}

struct Decomposition {
    matching_paths: usize,
    reduce_rounds: usize,
    separator: Vec<Vec<usize>>,
    seg: Segment,
    components: Vec<Portal>,
}

/// Separator, initial segment and portals of one subproblem, in local ids.
async fn decompose(hub: &Rc<Hub>, part: PartId, nc: usize, root: usize, k: usize, s: usize, seed: u64) -> Result<Decomposition> {
    let all: EdgeFilter = Rc::new(|_, _| true);
    let m = maximal_matching_in(hub.clone(), part, nc, all, derive(seed, "separator", 0)).await?;
    let mut q: Vec<Vec<usize>> = m.edges.iter().map(|e| vec![e.u, e.v]).collect();
    let matching_paths = q.len();
    let mut reduce_rounds = 0;
    while q.len() > SEPARATOR_TARGET {
        match reduce(hub, part, nc, &q, k, s, derive(seed, "reduce", reduce_rounds as u64)).await? {
            Some(next) => q = next,
            None => break,
        }
        reduce_rounds += 1;
    }
    let seg = initial_segment_in(hub, part, nc, root, q.clone(), derive(seed, "segment", 0)).await?;

    let rest: Vec<bool> = seg.depth.iter().map(Option::is_none).collect();
    let mut hanging = Vec::new();
    if rest.iter().any(|&x| x) {
        let rest = Rc::new(rest);
        let forest = hub.pass(part, MaskedForest::new(hub.model(), rest.clone(), derive(seed, "portal-forest", 0)));
        let labels: Labels = Rc::new((0..nc).map(|x| seg.depth[x].map(|d| (0, (d * nc + x) as u64))).collect());
        let best = max_neighbor_labels(hub.clone(), part, labels, 1).await;
        let comp = components(&rest, &forest.await.finish()?);
        let count = comp.iter().flatten().map(|c| c + 1).max().unwrap_or(0);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        let mut portal: Vec<Option<(u64, usize)>> = vec![None; count];
        for x in 0..nc {
            let Some(c) = comp[x] else { continue };
            members[c].push(x);
            if let Some(l) = best[x] {
                if portal[c].is_none_or(|(b, _)| l > b) {
                    portal[c] = Some((l, x));
                }
            }
        }
        for (c, nodes) in members.into_iter().enumerate() {
            let (label, entry) = portal[c].ok_or_else(|| lost(hub.model(), "a component's attachment"))?;
            hanging.push(Portal { nodes, attach: label as usize % nc, entry });
        }
    }
    Ok(Decomposition { matching_paths, reduce_rounds, separator: q, seg, components: hanging })
}

/// One Reduce round: the shorter half of the paths is routed by
/// MaximalPaths into the longer half (each long path a sink group). A path
/// that reaches long path l at node t continues along the longer side of
/// l from t, and the shorter side is released. The round is kept only if
/// it joined something and every component of the rest still has at most
/// half the nodes.
async fn reduce(hub: &Rc<Hub>, part: PartId, nc: usize, q: &[Vec<usize>], k: usize, s: usize, seed: u64) -> Result<Option<Vec<Vec<usize>>>> {
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(q[i].len()), i));
    let (long, short) = order.split_at(q.len() / 2);
    let sinks: Vec<Vec<usize>> = long.iter().map(|&i| q[i].clone()).collect();
    let sources: Vec<Vec<usize>> = short.iter().map(|&i| q[i].clone()).collect();
    let inst = MaximalPathsInstance::new(nc, sources.clone(), &sinks);
    let out = maximal_paths_in(hub.clone(), part, &inst, k, s, seed).await?;
    if out.paths.is_empty() {
        return Ok(None);
    }
    let mut used_short = vec![false; sources.len()];
    let mut used_long = vec![false; sinks.len()];
    let mut next = Vec::new();
    for o in &out.paths {
        used_short[o.input] = true;
        let t = *o.nodes.last().unwrap();
        let g = inst.sink_group[t].unwrap();
        used_long[g] = true;
        let l = &sinks[g];
        let pos = l.iter().position(|&x| x == t).unwrap();
        let mut path = o.nodes.clone();
        if l.len() - pos > pos {
            path.extend_from_slice(&l[pos + 1..]);
        } else {
            path.extend(l[..pos].iter().rev());
        }
        next.push(path);
    }
    next.extend(sources.iter().zip(&used_short).filter(|(_, &u)| !u).map(|(p, _)| p.clone()));
    next.extend(sinks.iter().zip(&used_long).filter(|(_, &u)| !u).map(|(p, _)| p.clone()));

    if largest_off(hub, part, nc, &next, derive(seed, "reduce-check", 0)).await? * 2 > nc {
        return Ok(None);
    }
    Ok(Some(next))
}

/// Size of the largest component left when the paths are removed.
async fn largest_off(hub: &Rc<Hub>, part: PartId, nc: usize, paths: &[Vec<usize>], seed: u64) -> Result<usize> {
    let mut rest = vec![true; nc];
    for &x in paths.iter().flatten() {
        rest[x] = false;
    }
    let rest = Rc::new(rest);
    let forest = hub.pass(part, MaskedForest::new(hub.model(), rest.clone(), seed)).await.finish()?;
    let comp = components(&rest, &forest);
    let mut size = vec![0usize; nc];
    for c in comp.iter().flatten() {
        size[*c] += 1;
    }
    Ok(size.into_iter().max().unwrap_or(0))
}

struct Segment {
    parent: Vec<Option<usize>>,
    depth: Vec<Option<usize>>,
    iterations: usize,
}

impl Segment {
    fn add(&mut self, x: usize, p: usize) {
        self.parent[x] = Some(p);
        self.depth[x] = Some(self.depth[p].unwrap() + 1);
    }

    fn chain(&mut self, mut from: usize, nodes: impl IntoIterator<Item = usize>) -> usize {
        for x in nodes {
            self.add(x, from);
            from = x;
        }
        from
    }
}

struct Separator {
    paths: Vec<Vec<usize>>,
    owner: Vec<Option<usize>>,
}

impl Separator {
    /// Removes `u` from its path and returns the longer side, ordered away
    /// from `u`; the shorter side stays in the separator.
    fn pierce(&mut self, u: usize) -> Vec<usize> {
        let i = self.owner[u].unwrap();
        let p = std::mem::take(&mut self.paths[i]);
        let pos = p.iter().position(|&x| x == u).unwrap();
        let (left, right) = (&p[..pos], &p[pos + 1..]);
        let (ext, keep): (Vec<usize>, Vec<usize>) =
            if right.len() >= left.len() { (right.to_vec(), left.to_vec()) } else { (left.iter().rev().copied().collect(), right.to_vec()) };
        self.owner[u] = None;
        for &x in &ext {
            self.owner[x] = None;
        }
        self.paths[i] = keep;
        ext
    }

    fn is_empty(&self) -> bool {
        self.paths.iter().all(Vec::is_empty)
    }
}

enum Reach {
    Direct(usize),
    /// forest component, its node next to the segment, its node next to Q
    Via(usize, usize, usize),
}

/// Grows a DFS initial segment from `root` until it contains every node of
/// the separator paths. Each iteration attaches, below the deepest possible
/// segment node, a path through unvisited non-separator nodes ending in a
/// separator node u, then follows the longer side of u's separator path.
async fn initial_segment_in(hub: &Rc<Hub>, part: PartId, nc: usize, root: usize, q: Vec<Vec<usize>>, seed: u64) -> Result<Segment> {
    let mut owner = vec![None; nc];
    for (i, p) in q.iter().enumerate() {
        for &x in p {
            owner[x] = Some(i);
        }
    }
    let mut sep = Separator { paths: q, owner };
    let mut seg = Segment { parent: vec![None; nc], depth: vec![None; nc], iterations: 0 };
    seg.depth[root] = Some(0);
    if sep.owner[root].is_some() {
        let ext = sep.pierce(root);
        seg.chain(root, ext);
    }
    while !sep.is_empty() {
        seg.iterations += 1;
        let free: Vec<bool> = (0..nc).map(|x| seg.depth[x].is_none() && sep.owner[x].is_none()).collect();
        let free = Rc::new(free);
        let forest = hub.pass(part, MaskedForest::new(hub.model(), free.clone(), derive(seed, "segment-forest", seg.iterations as u64)));
        let labels: Labels = Rc::new(
            (0..nc)
                .map(|x| match (seg.depth[x], sep.owner[x]) {
                    (Some(d), _) => Some((0, (d * nc + x) as u64)),
                    (None, Some(_)) => Some((1, x as u64)),
                    _ => None,
                })
                .collect(),
        );
        let best = max_neighbor_labels(hub.clone(), part, labels, 2).await;
        let forest = forest.await.finish()?;
        let comp = components(&free, &forest);
        let count = comp.iter().flatten().map(|c| c + 1).max().unwrap_or(0);
        let mut to_seg: Vec<Option<(u64, usize)>> = vec![None; count];
        let mut to_q: Vec<Option<usize>> = vec![None; count];
        let mut pick: Option<(u64, Reach)> = None;
        for x in 0..nc {
            let t = best[2 * x];
            if sep.owner[x].is_some() {
                if let Some(l) = t {
                    if pick.as_ref().is_none_or(|(b, _)| l > *b) {
                        pick = Some((l, Reach::Direct(x)));
                    }
                }
            }
            let Some(c) = comp[x] else { continue };
            if let Some(l) = t {
                if to_seg[c].is_none_or(|(b, _)| l > b) {
                    to_seg[c] = Some((l, x));
                }
            }
            if best[2 * x + 1].is_some() && to_q[c].is_none() {
                to_q[c] = Some(x);
            }
        }
        for c in 0..count {
            if let (Some((l, a)), Some(b)) = (to_seg[c], to_q[c]) {
                if pick.as_ref().is_none_or(|(best, _)| l > *best) {
                    pick = Some((l, Reach::Via(c, a, b)));
                }
            }
        }
        let (label, reach) = pick.ok_or_else(|| lost(hub.model(), "the route to a separator path"))?;
        let v = label as usize % nc;
        let (last, u) = match reach {
            Reach::Direct(u) => (v, u),
            Reach::Via(c, a, b) => {
                let route = forest_route(&forest, &comp, c, a, b);
                let u = best[2 * b + 1].unwrap() as usize;
                (seg.chain(v, route), u)
            }
        };
        seg.add(u, last);
        let ext = sep.pierce(u);
        seg.chain(u, ext);
    }
    Ok(seg)
}

/// Path from `a` to `b` along forest edges inside component `c`.
fn forest_route(forest: &[Edge], comp: &[Option<usize>], c: usize, a: usize, b: usize) -> Vec<usize> {
    let n = comp.len();
    let mut adj = vec![Vec::new(); n];
    for e in forest.iter().filter(|e| comp[e.u] == Some(c)) {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut prev = vec![usize::MAX; n];
    prev[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut route = vec![b];
    while *route.last().unwrap() != a {
        route.push(prev[*route.last().unwrap()]);
    }
    route.reverse();
    route
}

#[derive(Debug, Clone, Serialize)]
pub struct InitialSegment {
    pub root: Node,
    /// parents of segment nodes; None for the root and for nodes outside
    pub parent: Vec<Option<Node>>,
    pub depth: Vec<Option<usize>>,
    pub separator: PathSystem,
    pub components: Vec<Portal>,
    pub iterations: usize,
}

fn check_params(n: usize, r: Node, k: usize, s: usize) -> Result<()> {
    if r >= n {
        return Err(Error::Parameter(format!("root {r} out of range")));
    }
    if s == 0 || s > k || k > n.max(1) {
        return Err(Error::Parameter(format!("need 1 <= s <= k <= n, got s = {s}, k = {k}, n = {n}")));
    }
    Ok(())
}

/// Initial segment of a DFS tree of the whole graph rooted at `r`, with
/// the components it leaves and their portals.
pub fn initial_segment(session: &mut StreamSession<'_>, r: Node, k: usize, s: usize, seed: u64) -> Result<InitialSegment> {
    let n = session.n();
    check_params(n, r, k, s)?;
    with_retries(seed, 5, |seed| {
        Hub::run_one(session, move |hub| async move {
            if n == 1 {
                return Ok(InitialSegment { root: r, parent: vec![None], depth: vec![Some(0)], separator: PathSystem::default(), components: Vec::new(), iterations: 0 });
            }
            let d = decompose(&hub, 0, n, r, k, s, seed).await?;
            Ok(InitialSegment {
                root: r,
                parent: d.seg.parent,
                depth: d.seg.depth,
                separator: PathSystem::new(d.separator),
                components: d.components,
                iterations: d.seg.iterations,
            })
        })
    })
}

/// One Reduce round on a separator of the whole graph. Returns the input
/// unchanged when no joining step keeps the component bound.
pub fn reduce_separator(session: &mut StreamSession<'_>, q: &PathSystem, k: usize, s: usize, seed: u64) -> Result<PathSystem> {
    let n = session.n();
    if q.len() <= SEPARATOR_TARGET {
        return Err(Error::Domain(format!("a separator of {} paths needs no reduction", q.len())));
    }
    if s == 0 || s > k {
        return Err(Error::Parameter("need 1 <= s <= k".into()));
    }
    let paths = q.paths.clone();
    with_retries(seed, 5, |seed| {
        let paths = paths.clone();
        Hub::run_one(session, move |hub| async move {
            if largest_off(&hub, 0, n, &paths, derive(seed, "reduce-pre", 0)).await? * 2 > n {
                return Err(Error::Domain("a component off the separator has more than n/2 nodes".into()));
            }
            Ok(PathSystem::new(reduce(&hub, 0, n, &paths, k, s, seed).await?.unwrap_or(paths)))
        })
    })
}

/// DFS tree of a connected graph rooted at `r`. `k` is the MaximalPaths
/// stage-1 threshold and `s` its stage-2 batch size.
pub fn dfs_aa(session: &mut StreamSession<'_>, r: Node, k: usize, s: usize, seed: u64) -> Result<DfsAaResult> {
    let n = session.n();
    check_params(n, r, k, s)?;
    let start = session.passes();
    with_retries(seed, 5, |seed| {
        let sh = Rc::new(Shared { n, k, s, seed, parent: RefCell::new(vec![None; n]), log: RefCell::new(Vec::new()) });
        let hub = Hub::new(n, session.model());
        Hub::run(&hub, session, solve(hub.clone(), 0, (0..n).collect(), r, 0, sh.clone()))?;
        let tree = RootedTree::from_parents(r, sh.parent.borrow().clone())?;
        let subproblems = std::mem::take(&mut *sh.log.borrow_mut());
        let levels = subproblems.iter().map(|p| p.level + 1).max().unwrap_or(0);
        Ok(DfsAaResult { tree, k, s, passes: session.passes() - start, levels, subproblems })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, Generator};
    use crate::oracle::is_dfs_tree;

    #[test]
    fn small_fixtures() {
        for gen in [Generator::Path(30), Generator::Cycle(25), Generator::Star(20), Generator::Complete(12), Generator::Petersen] {
            let s = generate(&gen, 1).unwrap();
            let g = s.materialize().unwrap();
            let out = dfs_aa(&mut StreamSession::new(&s), 0, 4, 2, 7).unwrap();
            assert!(is_dfs_tree(&g, &out.tree), "{gen}");
        }
    }

    #[test]
    fn random_graphs_both_models() {
        for seed in 0..6u64 {
            let s = generate(&Generator::Gnp { n: 60, p: 0.08 }, seed).unwrap();
            let g = s.materialize().unwrap();
            let out = dfs_aa(&mut StreamSession::new(&s), seed as usize, 6, 3, seed).unwrap();
            assert!(is_dfs_tree(&g, &out.tree), "seed {seed}");
            for p in &out.subproblems {
                assert!(2 * p.largest_component <= p.size);
            }
        }
        let s = generate(&Generator::Gnp { n: 30, p: 0.12 }, 9).unwrap();
        let g = s.materialize().unwrap();
        let churn = s.with_churn(2, 20).unwrap();
        let out = dfs_aa(&mut StreamSession::new(&churn), 3, 4, 2, 1).unwrap();
        assert!(is_dfs_tree(&g, &out.tree));
    }

    fn largest_without(g: &crate::graph::AdjacencyGraph, removed: &[bool]) -> usize {
        let h = g.induced(|x| !removed[x]);
        let comp = h.components();
        let mut size = vec![0; g.n()];
        for x in (0..g.n()).filter(|&x| !removed[x]) {
            size[comp[x]] += 1;
        }
        size.into_iter().max().unwrap_or(0)
    }

    #[test]
    fn segment_portals_are_deepest() {
        let s = generate(&Generator::Gnp { n: 150, p: 0.08 }, 5).unwrap();
        let g = s.materialize().unwrap();
        let seg = initial_segment(&mut StreamSession::new(&s), 0, 11, 3, 2).unwrap();
        let in_seg: Vec<bool> = seg.depth.iter().map(Option::is_some).collect();
        assert!(2 * largest_without(&g, &in_seg) <= g.n());
        for c in &seg.components {
            let deepest = c.nodes.iter().flat_map(|&x| g.neighbors(x)).filter_map(|&y| seg.depth[y]).max().unwrap();
            assert_eq!(seg.depth[c.attach], Some(deepest));
            assert!(g.has_edge(c.attach, c.entry) && c.nodes.contains(&c.entry));
        }
        let star = generate(&Generator::Star(9), 0).unwrap();
        let seg = initial_segment(&mut StreamSession::new(&star), 0, 2, 1, 0).unwrap();
        assert!(seg.components.iter().all(|c| c.nodes.len() == 1));
    }

    #[test]
    fn reduce_shrinks_separator() {
        let s = generate(&Generator::Gnp { n: 200, p: 0.05 }, 11).unwrap();
        let g = s.materialize().unwrap();
        let mut matched = vec![false; g.n()];
        let mut q = Vec::new();
        for e in g.edges() {
            if !matched[e.u] && !matched[e.v] {
                matched[e.u] = true;
                matched[e.v] = true;
                q.push(vec![e.u, e.v]);
            }
        }
        let q = PathSystem::new(q);
        let r = reduce_separator(&mut StreamSession::new(&s), &q, 8, 4, 3).unwrap();
        r.validate(&g).unwrap();
        assert!(12 * r.len() <= 11 * q.len() + 11, "{} -> {}", q.len(), r.len());
        let mut removed = vec![false; g.n()];
        r.nodes().for_each(|x| removed[x] = true);
        assert!(2 * largest_without(&g, &removed) <= g.n());
        let small = PathSystem::new(q.paths[..11].to_vec());
        assert!(matches!(reduce_separator(&mut StreamSession::new(&s), &small, 8, 4, 3), Err(Error::Domain(_))));
    }
}
