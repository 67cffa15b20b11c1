//! Sampled-centers BFS. Every center runs a radius-h local BFS that starts
//! at a random pass, so each node only takes part in a few searches per
//! pass and only remembers the last three layers of each. Distances
//! between centers give the source distances on an overlay graph, and a
//! second stage spreads them to every node.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::Arc;

use rand::Rng as _;
use serde::Serialize;

use super::{BfsResult, DistanceTable};
use crate::error::{Error, Result};
use crate::graph::Node;
use crate::harness::{Model, StreamSession};
use crate::rng::{derive, rng};
use crate::sketch::{default_reps, L0Params, L0Query, L0Sketch};
use crate::tree::RootedTree;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfsConfig {
    /// Center budget: each node is a center with probability k/n.
    pub k: usize,
    /// The constant C in the radius h = C n ln n / k - 1.
    pub confidence: f64,
    pub seed: u64,
    /// Keep per-pass, per-node counts of active searches.
    pub record_congestion: bool,
    /// Forget a layer once the search has moved two layers past it.
    pub truncate: bool,
}

impl BfsConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        BfsConfig { k, confidence: 3.0, seed, record_congestion: false, truncate: true }
    }
}

/// Local search radius, clamped to [1, n-1].
pub fn radius(n: usize, k: usize, confidence: f64) -> usize {
    let nf = n.max(2) as f64;
    let h = (confidence * nf * nf.ln() / k.max(1) as f64).ceil() as usize;
    h.saturating_sub(1).clamp(1, n.saturating_sub(1).max(1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schedule {
    /// Sorted center ids.
    pub centers: Vec<Node>,
    pub h: usize,
    /// Start pass of each center's search, uniform in 1..=h.
    pub start: Vec<usize>,
}

impl Schedule {
    pub fn sample(n: usize, forced: &[Node], k: usize, h: usize, seed: u64) -> Schedule {
        let mut r = rng(seed, "centers");
        let p = (k as f64 / n.max(1) as f64).min(1.0);
        let mut chosen = vec![false; n];
        for &f in forced {
            chosen[f] = true;
        }
        for c in chosen.iter_mut() {
            if !*c && r.gen_bool(p) {
                *c = true;
            }
        }
        let centers: Vec<Node> = (0..n).filter(|&v| chosen[v]).collect();
        let mut s = Schedule { centers, h, start: Vec::new() };
        s.start = s.draw_starts(seed);
        s
    }

    fn draw_starts(&self, seed: u64) -> Vec<usize> {
        let mut r = rng(seed, "start-times");
        self.centers.iter().map(|_| r.gen_range(1..=self.h)).collect()
    }

    /// Same centers, fresh start times.
    pub fn restart(&self, seed: u64) -> Schedule {
        Schedule { centers: self.centers.clone(), h: self.h, start: self.draw_starts(seed) }
    }

    /// Passes one wave of searches takes: the last layer is reached in
    /// pass start + h - 1.
    pub fn passes(&self) -> usize {
        self.start.iter().max().map_or(0, |&t| t + self.h - 1)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BfsStats {
    pub h: usize,
    pub centers: usize,
    pub step1_passes: usize,
    pub step2_passes: usize,
    pub total_passes: usize,
    pub max_congestion: u32,
    /// `congestion[t][v]`: searches node v took part in during pass t of
    /// the first wave. Empty unless recorded.
    #[serde(skip)]
    pub congestion: Vec<Vec<u32>>,
}

/// Group membership for the turnstile frontier samplers: each center joins
/// each of `y` groups with probability 1/x.
struct Groups {
    of: Vec<Vec<u32>>,
}

impl Groups {
    fn new(n: usize, sched: &Schedule, seed: u64) -> Groups {
        let ln = (n.max(2) as f64).ln();
        let x = (6.0 * ln.max(sched.centers.len() as f64 / sched.h as f64)).ceil().max(1.0);
        let y = (8.0 * x * ln).ceil() as u32;
        let mut r = rng(seed, "center-groups");
        let of = sched
            .centers
            .iter()
            .map(|_| (0..y).filter(|_| r.gen_bool(1.0 / x)).collect())
            .collect();
        Groups { of }
    }
}

/// Runs one wave of local searches. `hit(center_index, node, dist)` fires
/// once per discovered (center, node) pair.
fn run_wave(
    session: &mut StreamSession<'_>,
    sched: &Schedule,
    cfg: &BfsConfig,
    resident: usize,
    stats: &mut BfsStats,
    record: bool,
    mut hit: impl FnMut(usize, Node, usize),
) -> Result<usize> {
    let n = session.n();
    let model = session.model();
    let h = sched.h;
    let tau = &sched.start;
    let total = sched.passes();
    let groups = (model == Model::Turnstile).then(|| Groups::new(n, sched, derive(cfg.seed, "groups", total as u64)));
    let mut known: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut fresh = Vec::new();
    let expanding = |t: usize, (ci, d): (u32, u32)| tau[ci as usize] + d as usize == t && (d as usize) < h;
    for t in 1..=total {
        for (ci, &u) in sched.centers.iter().enumerate() {
            if tau[ci].saturating_sub(1).max(1) == t {
                known[u].push((ci as u32, 0));
                hit(ci, u, 0);
            }
        }
        let mut sampler_words = 0;
        match &groups {
            None => {
                for up in session.pass() {
                    for (a, b) in [(up.u, up.v), (up.v, up.u)] {
                        fresh.clear();
                        for &e in &known[a] {
                            if expanding(t, e) && !known[b].iter().any(|k| k.0 == e.0) {
                                fresh.push((e.0, e.1 + 1));
                            }
                        }
                        for &(ci, d) in &fresh {
                            known[b].push((ci, d));
                            hit(ci as usize, b, d as usize);
                        }
                    }
                }
            }
            Some(groups) => {
                let universe = (sched.centers.len() * n).max(2) as u64;
                let params = L0Params::new(universe, derive(cfg.seed, "frontier", t as u64), 4);
                let mut samplers: BTreeMap<(Node, u32), L0Sketch> = BTreeMap::new();
                for up in session.pass() {
                    for (a, b) in [(up.u, up.v), (up.v, up.u)] {
                        for &e in &known[a] {
                            if expanding(t, e) && !known[b].iter().any(|k| k.0 == e.0) {
                                let item = e.0 as u64 * n as u64 + a as u64;
                                for &j in &groups.of[e.0 as usize] {
                                    samplers.entry((b, j)).or_insert_with(|| L0Sketch::new(Arc::clone(&params))).update(item, up.sign as i64);
                                }
                            }
                        }
                    }
                }
                sampler_words = samplers.values().map(L0Sketch::words).sum();
                for ((v, _), sk) in &samplers {
                    let L0Query::Index(item) = sk.query() else { continue };
                    let (ci, a) = ((item / n as u64) as u32, (item % n as u64) as usize);
                    if (ci as usize) >= sched.centers.len() || known[*v].iter().any(|k| k.0 == ci) {
                        continue;
                    }
                    let Some(&(_, d)) = known[a].iter().find(|&&e| e.0 == ci && expanding(t, e)) else { continue };
                    known[*v].push((ci, d + 1));
                    hit(ci as usize, *v, d as usize + 1);
                }
            }
        }
        let live: usize = known.iter().map(Vec::len).sum();
        session.charge(resident + 2 * live + sampler_words + n)?;
        if record {
            let row: Vec<u32> = known.iter().map(|k| k.len() as u32).collect();
            stats.max_congestion = stats.max_congestion.max(row.iter().copied().max().unwrap_or(0));
            if cfg.record_congestion {
                stats.congestion.push(row);
            }
        }
        if cfg.truncate {
            for list in known.iter_mut() {
                list.retain(|&(ci, d)| tau[ci as usize] + d as usize + 1 > t);
            }
        }
    }
    Ok(total)
}

fn overlay_distances(centers: usize, edges: &[(u32, u32, u32)], from: usize) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); centers];
    for &(a, b, d) in edges {
        adj[a as usize].push((b as usize, d as usize));
        adj[b as usize].push((a as usize, d as usize));
    }
    let mut dist = vec![None; centers];
    let mut heap = BinaryHeap::from([Reverse((0usize, from))]);
    dist[from] = Some(0);
    while let Some(Reverse((d, x))) = heap.pop() {
        if dist[x] != Some(d) {
            continue;
        }
        for &(y, w) in &adj[x] {
            if dist[y].is_none_or(|dy| d + w < dy) {
                dist[y] = Some(d + w);
                heap.push(Reverse((d + w, y)));
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiBfs {
    pub table: DistanceTable,
    /// `parents[i][v]`: parent of v in the tree of sources[i].
    pub parents: Vec<Vec<Option<Node>>>,
    pub schedule: Schedule,
    pub stats: BfsStats,
}

impl MultiBfs {
    pub fn result(&self, i: usize) -> BfsResult {
        BfsResult {
            root: self.table.sources[i],
            dist: self.table.dist[i].clone(),
            parent: self.parents[i].clone(),
            passes: self.stats.total_passes,
        }
    }

    pub fn tree(&self, i: usize) -> Result<RootedTree> {
        RootedTree::from_parents(self.table.sources[i], self.parents[i].clone())
    }
}

struct Step1 {
    sched: Schedule,
    index: Vec<Option<usize>>,
    /// Source distances to every center, per source.
    to_centers: Vec<Vec<usize>>,
}

fn validate(n: usize, sources: &[Node], cfg: &BfsConfig) -> Result<()> {
    if sources.is_empty() {
        return Err(Error::Parameter("at least one source is required".into()));
    }
    if let Some(&bad) = sources.iter().find(|&&s| s >= n) {
        return Err(Error::Parameter(format!("source {bad} out of range")));
    }
    if cfg.k == 0 || cfg.k > n.max(1) {
        return Err(Error::Parameter(format!("center budget k = {} outside [1, {n}]", cfg.k)));
    }
    if sources.len() > cfg.k {
        return Err(Error::Parameter(format!("{} sources exceed the center budget k = {}", sources.len(), cfg.k)));
    }
    if !(cfg.confidence > 0.0) {
        return Err(Error::Parameter("confidence constant must be positive".into()));
    }
    Ok(())
}

fn step1(session: &mut StreamSession<'_>, sources: &[Node], cfg: &BfsConfig, stats: &mut BfsStats) -> Result<Step1> {
    let n = session.n();
    let h = radius(n, cfg.k, cfg.confidence);
    let sched = Schedule::sample(n, sources, cfg.k, h, derive(cfg.seed, "schedule", 0));
    let mut index = vec![None; n];
    for (i, &c) in sched.centers.iter().enumerate() {
        index[c] = Some(i);
    }
    let mut overlay: Vec<(u32, u32, u32)> = Vec::new();
    let centers = sched.centers.len();
    stats.h = h;
    stats.centers = centers;
    stats.step1_passes = run_wave(session, &sched, cfg, 0, stats, true, |ci, v, d| {
        if let Some(cj) = index[v] {
            if cj != ci {
                overlay.push((ci as u32, cj as u32, d as u32));
            }
        }
    })?;
    session.charge(3 * overlay.len() + centers)?;
    let mut to_centers = Vec::with_capacity(sources.len());
    for &s in sources {
        let d = overlay_distances(centers, &overlay, index[s].unwrap());
        if d.iter().any(Option::is_none) {
            return Err(Error::Retryable("overlay graph does not reach every center".into()));
        }
        to_centers.push(d.into_iter().map(Option::unwrap).collect());
    }
    Ok(Step1 { sched, index, to_centers })
}

/// Distances between every pair of `nodes`, from the center overlay alone.
pub fn pairwise_distances(session: &mut StreamSession<'_>, nodes: &[Node], cfg: &BfsConfig) -> Result<DistanceTable> {
    validate(session.n(), nodes, cfg)?;
    let mut stats = BfsStats::default();
    let s1 = step1(session, nodes, cfg, &mut stats)?;
    let dist = s1
        .to_centers
        .iter()
        .map(|row| nodes.iter().map(|&t| Some(row[s1.index[t].unwrap()])).collect())
        .collect();
    Ok(DistanceTable { sources: nodes.to_vec(), targets: nodes.to_vec(), dist })
}

/// One BFS tree per source, sharing the center searches.
pub fn multi_bfs(session: &mut StreamSession<'_>, sources: &[Node], cfg: &BfsConfig) -> Result<MultiBfs> {
    let n = session.n();
    validate(n, sources, cfg)?;
    let start = session.passes();
    let mut stats = BfsStats::default();
    let s1 = step1(session, sources, cfg, &mut stats)?;
    let c = sources.len();
    let mut est: Vec<Vec<Option<usize>>> = vec![vec![None; n]; c];
    let before = session.passes();
    match session.model() {
        Model::InsertionOnly => {
            for i in 0..c {
                for (cj, &u) in s1.sched.centers.iter().enumerate() {
                    est[i][u] = Some(s1.to_centers[i][cj]);
                }
            }
            let mut settled = false;
            for _ in 0..s1.sched.h {
                let mut changed = false;
                for up in session.pass() {
                    for row in est.iter_mut() {
                        for (a, b) in [(up.u, up.v), (up.v, up.u)] {
                            if let Some(da) = row[a] {
                                if row[b].is_none_or(|db| da + 1 < db) {
                                    row[b] = Some(da + 1);
                                    changed = true;
                                }
                            }
                        }
                    }
                }
                session.charge(c * n + n)?;
                if !changed {
                    settled = true;
                    break;
                }
            }
            if settled && est.iter().any(|row| row.iter().any(Option::is_none)) {
                return Err(Error::Domain("graph is not connected".into()));
            }
        }
        Model::Turnstile => {
            let wave = s1.sched.restart(derive(cfg.seed, "schedule", 1));
            let base = &s1.to_centers;
            run_wave(session, &wave, cfg, c * n, &mut stats, false, |ci, v, d| {
                for i in 0..c {
                    let cand = base[i][ci] + d;
                    if est[i][v].is_none_or(|e| cand < e) {
                        est[i][v] = Some(cand);
                    }
                }
            })?;
        }
    }
    stats.step2_passes = session.passes() - before;
    let parents = confirm(session, sources, &est, derive(cfg.seed, "confirm", 0))?;
    stats.total_passes = session.passes() - start;
    Ok(MultiBfs {
        table: DistanceTable { sources: sources.to_vec(), targets: (0..n).collect(), dist: est },
        parents,
        schedule: s1.sched,
        stats,
    })
}

/// Checks in one pass that every label row is exactly the BFS distance
/// from its source, and picks parents: the smallest-id neighbour one level
/// up in insertion-only streams, a sampled one in turnstile streams.
///
/// Labels are exact iff the source has label 0, every other node a
/// positive label and a neighbour one level up, and no edge spans more
/// than one level.
fn confirm(session: &mut StreamSession<'_>, sources: &[Node], est: &[Vec<Option<usize>>], seed: u64) -> Result<Vec<Vec<Option<Node>>>> {
    let n = session.n();
    let c = sources.len();
    for (i, &s) in sources.iter().enumerate() {
        let row = &est[i];
        if row[s] != Some(0) || (0..n).any(|v| v != s && row[v].is_none_or(|d| d == 0)) {
            return Err(Error::Retryable("distance labels are incomplete".into()));
        }
    }
    let d = |i: usize, v: Node| est[i][v].unwrap();
    let mut parents = vec![vec![None; n]; c];
    match session.model() {
        Model::InsertionOnly => {
            let mut bad = false;
            for up in session.pass() {
                for i in 0..c {
                    let (da, db) = (d(i, up.u), d(i, up.v));
                    bad |= da.abs_diff(db) > 1;
                    for (a, b, da, db) in [(up.u, up.v, da, db), (up.v, up.u, db, da)] {
                        if db == da + 1 && parents[i][b].is_none_or(|p: Node| a < p) {
                            parents[i][b] = Some(a);
                        }
                    }
                }
            }
            session.charge(2 * c * n)?;
            if bad {
                return Err(Error::Retryable("an edge spans more than one BFS level".into()));
            }
        }
        Model::Turnstile => {
            let params = L0Params::new(n.max(2) as u64, seed, default_reps(n));
            let mut up_count = vec![vec![0i64; n]; c];
            let mut pick: Vec<Vec<L0Sketch>> = (0..c).map(|_| (0..n).map(|_| L0Sketch::new(Arc::clone(&params))).collect()).collect();
            let mut bad = vec![0i64; c];
            for up in session.pass() {
                let sign = up.sign as i64;
                for i in 0..c {
                    let (da, db) = (d(i, up.u), d(i, up.v));
                    if da.abs_diff(db) > 1 {
                        bad[i] += sign;
                    }
                    for (a, b, da, db) in [(up.u, up.v, da, db), (up.v, up.u, db, da)] {
                        if db == da + 1 {
                            up_count[i][b] += sign;
                            pick[i][b].update(a as u64, sign);
                        }
                    }
                }
            }
            let words: usize = pick.iter().flatten().map(L0Sketch::words).sum();
            session.charge(words + c * n + c)?;
            if bad.iter().any(|&b| b != 0) {
                return Err(Error::Retryable("an edge spans more than one BFS level".into()));
            }
            for i in 0..c {
                for v in (0..n).filter(|&v| v != sources[i] && up_count[i][v] > 0) {
                    if let L0Query::Index(a) = pick[i][v].query() {
                        let a = a as usize;
                        if a < n && d(i, a) + 1 == d(i, v) {
                            parents[i][v] = Some(a);
                        }
                    }
                }
            }
        }
    }
    for (i, &s) in sources.iter().enumerate() {
        if (0..n).any(|v| v != s && parents[i][v].is_none()) {
            return Err(Error::Retryable("some node has no parent one level up".into()));
        }
    }
    Ok(parents)
}

/// Single-source sampled-centers BFS.
pub fn bfs_randomized(session: &mut StreamSession<'_>, s: Node, cfg: &BfsConfig) -> Result<(BfsResult, BfsStats)> {
    let m = multi_bfs(session, &[s], cfg)?;
    Ok((m.result(0), m.stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, Generator};
    use crate::oracle::{exact_distances, is_bfs_tree};

    #[test]
    fn every_node_a_center() {
        let st = generate(&Generator::Gnp { n: 60, p: 0.08 }, 2).unwrap();
        let g = st.materialize().unwrap();
        let (r, stats) = bfs_randomized(&mut StreamSession::new(&st), 0, &BfsConfig::new(60, 1)).unwrap();
        assert_eq!(stats.centers, 60);
        assert_eq!(r.dist, exact_distances(&g, &[0])[0]);
        assert!(is_bfs_tree(&g, &r.tree().unwrap()));
    }

    #[test]
    fn sparse_centers_still_exact() {
        let st = generate(&Generator::Gnp { n: 150, p: 0.03 }, 5).unwrap();
        let g = st.materialize().unwrap();
        let cfg = BfsConfig::new(30, 9);
        let mut session = StreamSession::new(&st);
        let (r, stats) = crate::error::with_retries(9, 5, |seed| bfs_randomized(&mut session, 3, &BfsConfig { seed, ..cfg })).unwrap();
        assert_eq!(r.dist, exact_distances(&g, &[3])[0]);
        assert!(stats.total_passes <= 2 * (2 * stats.h - 1) + 1);
    }

    #[test]
    fn truncation_does_not_change_center_distances() {
        let st = generate(&Generator::Gnp { n: 100, p: 0.05 }, 8).unwrap();
        let nodes: Vec<Node> = (0..100).step_by(7).collect();
        let cfg = BfsConfig::new(40, 2);
        let a = pairwise_distances(&mut StreamSession::new(&st), &nodes, &cfg);
        let b = pairwise_distances(&mut StreamSession::new(&st), &nodes, &BfsConfig { truncate: false, ..cfg });
        match (a, b) {
            (Ok(a), Ok(b)) => assert_eq!(a, b),
            (Err(a), Err(b)) => assert!(a.is_retryable() && b.is_retryable()),
            _ => panic!("truncation changed the outcome"),
        }
    }

    #[test]
    fn turnstile_bfs() {
        let st = generate(&Generator::Gnp { n: 40, p: 0.12 }, 1).unwrap();
        let g = st.materialize().unwrap();
        let turn = st.with_churn(3, 30).unwrap();
        let mut session = StreamSession::new(&turn);
        let m = crate::error::with_retries(4, 5, |seed| multi_bfs(&mut session, &[0, 5], &BfsConfig { seed, ..BfsConfig::new(12, 0) })).unwrap();
        let truth = exact_distances(&g, &[0, 5]);
        for i in 0..2 {
            assert_eq!(m.table.dist[i], truth[i]);
            assert!(is_bfs_tree(&g, &m.tree(i).unwrap()));
        }
    }
}
