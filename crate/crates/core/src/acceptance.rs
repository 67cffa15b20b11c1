//! The acceptance suite: fifteen checks of the algorithms against the
//! brute-force oracles, each reporting pass/fail with measured values.
//! Used by `semistream bench` and by the `acceptance` test target.

use std::time::Instant;

use rand::Rng as _;
use serde::Serialize;

use crate::bfs::{bfs_deterministic, bfs_randomized, diameter_approx, max_path_degree_sum, radius, steiner_2approx, BfsConfig};
use crate::cert::{edge_certificate_insertion, vc_certificate};
use crate::dfs::{dfs_aa, dfs_simple, maximal_paths, MaximalPathsInstance, SimpleLevel};
use crate::error::{with_retries, Error, Result};
use crate::graph::{AdjacencyGraph, Edge, Node};
use crate::harness::{generate, generate_graph, GraphStream, Generator, StreamSession};
use crate::mlst::{approx_mlst, build_sparsifier_with_k, connected_max_cut, count_inodes, dead_leaf_tree};
use crate::oracle::{
    connected_max_cut_exact, edge_connectivity, exact_distances, exact_leaf, is_bfs_tree, is_dfs_tree, maximality_check,
    node_connectivity, output_well_formed, steiner_opt,
};
use crate::rng::{derive, rng};
use crate::sketch::{L0Query, L0Sketch};

/// Ids and titles of the criteria, in report order.
pub const CRITERIA: [(u32, &str); 15] = [
    (1, "dead-leaf bound"),
    (2, "sparsifier contract"),
    (3, "mlst factor 2"),
    (4, "mlst one-pass lower-bound family"),
    (5, "bfs exactness"),
    (6, "bfs degree sum"),
    (7, "pass bounds"),
    (8, "center congestion"),
    (9, "diameter approximation"),
    (10, "steiner 2-approximation"),
    (11, "dfs validity"),
    (12, "maximal paths contract"),
    (13, "certificates"),
    (14, "sketch statistics"),
    (15, "connected max cut"),
];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub measured: String,
    pub seconds: f64,
}

impl CriterionReport {
    /// One line: id, PASS/FAIL, title, measurements, time.
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {:<34} {} ({:.1} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.measured,
            self.seconds
        )
    }
}

struct Outcome {
    passed: bool,
    measured: String,
}

fn outcome(passed: bool, measured: String) -> Result<Outcome> {
    Ok(Outcome { passed, measured })
}

/// Runs one criterion. Errors inside a criterion count as a failure with
/// the error as its measurement.
pub fn run_criterion(id: u32) -> Result<CriterionReport> {
    let title = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Parameter(format!("no acceptance criterion {id}")))?
        .1;
    let start = Instant::now();
    let result = match id {
        1 => dead_leaf_bound(),
        2 => sparsifier_contract(),
        3 => mlst_factor(),
        4 => lower_bound_family(),
        5 => bfs_exactness(),
        6 => degree_sum(),
        7 => pass_bounds(),
        8 => congestion(),
        9 => diameter(),
        10 => steiner(),
        11 => dfs_validity(),
        12 => maximal_paths_contract(),
        13 => certificates(),
        14 => sketch_statistics(),
        _ => connected_cut(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, measured) = match result {
        Ok(o) => (o.passed, o.measured),
        Err(e) => (false, format!("error: {e}")),
    };
    Ok(CriterionReport { id, title: title.to_string(), passed, measured, seconds })
}

/// Runs the given criteria (all of them for an empty list).
pub fn run_suite(ids: &[u32]) -> Result<Vec<CriterionReport>> {
    let all: Vec<u32> = CRITERIA.iter().map(|c| c.0).collect();
    let ids = if ids.is_empty() { &all[..] } else { ids };
    ids.iter().map(|&id| run_criterion(id)).collect()
}

fn graph(kind: &Generator, seed: u64) -> Result<(GraphStream, AdjacencyGraph)> {
    let s = generate(kind, seed)?;
    let g = s.materialize()?;
    Ok((s, g))
}

/// Connected G(n, p) with p cycling through sparse to dense settings.
fn mixed_gnp(n: usize, i: u64) -> Generator {
    let nf = n as f64;
    let p = match i % 5 {
        0 => 1.2 / nf,
        1 => 2.5 / nf,
        2 => 0.08,
        3 => 0.2,
        _ => 0.5,
    };
    Generator::Gnp { n, p: p.min(1.0) }
}

fn dead_leaf_bound() -> Result<Outcome> {
    let start = Instant::now();
    let mut fixtures: Vec<(Generator, u64)> = (0..500u64).map(|i| (mixed_gnp(3 + (i as usize * 7) % 58, i), i)).collect();
    for f in [Generator::Path(20), Generator::Cycle(20), Generator::Star(20), Generator::Petersen] {
        fixtures.push((f, 0));
    }
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for (kind, seed) in &fixtures {
        let g = generate_graph(kind, *seed)?;
        let t = dead_leaf_tree(&g, *seed as usize % g.n())?;
        let bound = (g.n() - count_inodes(&g)) as f64 / 10.0;
        let leaves = t.leaf_count() as f64;
        if leaves < bound {
            violations += 1;
        }
        if bound > 0.0 {
            tightest = tightest.min(leaves / bound);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        violations == 0 && secs < 10.0,
        format!("{violations} violations over {} graphs, min leaves/bound {tightest:.2}, {secs:.1} s (limit 10 s)", fixtures.len()),
    )
}

fn sparsifier_contract() -> Result<Outcome> {
    let mut violations = 0;
    let mut exact_checks = 0;
    for i in 0..200u64 {
        let n = if i % 2 == 0 { 5 + (i as usize / 2) % 10 } else { 15 + (i as usize / 2) % 26 };
        let (s, g) = graph(&mixed_gnp(n, i / 2), i)?;
        let k = if i % 4 == 0 { g.max_degree() } else { 1 + (i as usize) % 4 };
        let stream = if i % 8 == 3 { s.with_churn(i, n)? } else { s };
        let r = with_retries(i, 5, |seed| build_sparsifier_with_k(&mut StreamSession::new(&stream), k, seed))?;
        let h = AdjacencyGraph::from_edges(n, r.edges.iter().copied())?;
        let ok = h.is_connected() && h.m() <= (k + 1) * n && h.is_subgraph_of(&g);
        let mut same = true;
        if g.max_degree() <= k && n <= 14 {
            exact_checks += 1;
            same = exact_leaf(&h)? == exact_leaf(&g)?;
        }
        if !(ok && same) {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations over 200 graphs, {exact_checks} exact leaf(H) = leaf(G) checks"))
}

fn mlst_factor() -> Result<Outcome> {
    let start = Instant::now();
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for i in 0..40u64 {
        let n = 6 + (i as usize) % 9;
        let (s, g) = graph(&mixed_gnp(n, i), 100 + i)?;
        let t = with_retries(i, 5, |seed| approx_mlst(&mut StreamSession::new(&s), 0.5, seed))?;
        t.check_spans(&g)?;
        let opt = exact_leaf(&g)?;
        if 2 * t.leaf_count() < opt {
            violations += 1;
        }
        if opt > 0 {
            worst = worst.min(t.leaf_count() as f64 / opt as f64);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(violations == 0 && secs < 60.0, format!("{violations} violations over 40 graphs, worst ratio {worst:.2}, {secs:.1} s (limit 60 s)"))
}

fn lower_bound_family() -> Result<Outcome> {
    let mut violations = 0;
    let mut count = 0;
    for n in [1usize, 2, 3, 5, 8, 10] {
        for k in 1..=3usize {
            for rep in 0..2u64 {
                let mut r = rng(derive(n as u64, "index-bits", k as u64 * 10 + rep), "bits");
                let mut bits: Vec<bool> = (0..n * n).map(|_| r.gen_bool(0.5)).collect();
                let query = (r.gen_range(0..n), r.gen_range(0..n));
                let mut leaf = [0usize; 2];
                for (b, slot) in leaf.iter_mut().enumerate() {
                    bits[query.0 * n + query.1] = b == 1;
                    let g = generate_graph(&Generator::IndexHard { n, k, bits: bits.clone(), query }, 0)?;
                    *slot = exact_leaf(&g)?;
                }
                count += 1;
                if leaf[1] != leaf[0] + k + 1 {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations over {count} bit pairs (gap must be k+1)"))
}

fn bfs_graph(i: u64) -> Result<(GraphStream, AdjacencyGraph)> {
    let n = 50 + (i as usize * 37) % 451;
    let c = [1.5, 3.0, 6.0][i as usize % 3];
    graph(&Generator::Gnp { n, p: (c / n as f64).min(1.0) }, 1000 + i)
}

fn bfs_center_budget(n: usize) -> usize {
    (n / 4).max(1)
}

fn bfs_exactness() -> Result<Outcome> {
    let mut det_wrong = 0;
    let mut silent_wrong = 0;
    let mut successes = 0;
    for i in 0..100u64 {
        let (s, g) = bfs_graph(i)?;
        let n = g.n();
        let root = (i as usize * 13) % n;
        let truth = exact_distances(&g, &[root]).remove(0);
        let d = bfs_deterministic(&mut StreamSession::new(&s), root, 1 + i as usize % 8)?;
        if d.dist != truth || !is_bfs_tree(&g, &d.tree()?) {
            det_wrong += 1;
        }
        match bfs_randomized(&mut StreamSession::new(&s), root, &BfsConfig::new(bfs_center_budget(n), i)) {
            Ok((r, _)) => {
                if r.dist == truth && is_bfs_tree(&g, &r.tree()?) {
                    successes += 1;
                } else {
                    silent_wrong += 1;
                }
            }
            Err(e) if e.is_retryable() => {}
            Err(e) => return Err(e),
        }
    }
    outcome(
        det_wrong == 0 && silent_wrong == 0 && successes >= 98,
        format!("deterministic {det_wrong} wrong; randomized {successes}/100 succeeded (need 98), {silent_wrong} silent wrong"),
    )
}

fn degree_sum() -> Result<Outcome> {
    let mut violations = 0;
    let mut trees = 0;
    let mut max_ratio: f64 = 0.0;
    for i in 0..30u64 {
        let (s, g) = bfs_graph(i)?;
        let n = g.n();
        let d = bfs_deterministic(&mut StreamSession::new(&s), 0, 4)?;
        let (r, _) = with_retries(i, 5, |seed| bfs_randomized(&mut StreamSession::new(&s), 0, &BfsConfig::new(bfs_center_budget(n), seed)))?;
        for t in [d.tree()?, r.tree()?] {
            trees += 1;
            let sum = max_path_degree_sum(&g, &t);
            max_ratio = max_ratio.max(sum as f64 / n as f64);
            if sum > 3 * n {
                violations += 1;
            }
        }
    }
    let (s, g) = graph(&Generator::LayeredBlocks { n: 1000, t: 25 }, 0)?;
    let t = bfs_deterministic(&mut StreamSession::new(&s), 0, 10)?.tree()?;
    let witness = max_path_degree_sum(&g, &t);
    if witness > 3 * g.n() {
        violations += 1;
    }
    outcome(
        violations == 0 && 10 * witness >= 25 * g.n(),
        format!(
            "{violations} violations over {} trees (max sum/n {max_ratio:.2}); layered(1000,25) sum/n {:.3} (need >= 2.5)",
            trees + 1,
            witness as f64 / g.n() as f64
        ),
    )
}

fn pass_bounds() -> Result<Outcome> {
    let mut rand_worst = 0i64;
    let mut det_worst: f64 = 0.0;
    let mut simple_worst = 0i64;
    let mut ok = true;
    let fixtures: Vec<(Generator, u64)> = vec![
        (Generator::Gnp { n: 300, p: 0.01 }, 1),
        (Generator::Gnp { n: 200, p: 0.05 }, 2),
        (Generator::Path(120), 0),
        (Generator::Cycle(150), 0),
        (Generator::Star(100), 0),
        (Generator::LayeredBlocks { n: 1000, t: 25 }, 0),
        (Generator::RandomRegular { n: 100, d: 3 }, 3),
    ];
    for (kind, seed) in &fixtures {
        let (s, g) = graph(kind, *seed)?;
        let n = g.n();
        let log = (n as f64).log2().ceil() as i64;
        for k in [n / 8, n / 3] {
            let k = k.max(1);
            let cfg = BfsConfig::new(k, *seed);
            let h = (cfg.confidence * n as f64 * (n as f64).ln() / k as f64).ceil() as i64;
            debug_assert!(radius(n, k, cfg.confidence) as i64 <= h);
            let mut session = StreamSession::new(&s);
            if let Ok((_, stats)) = bfs_randomized(&mut session, 0, &cfg) {
                let slack = session.passes() as i64 - 2 * (2 * h - 1);
                rand_worst = rand_worst.max(slack);
                ok &= slack <= log && stats.total_passes == session.passes();
            }
        }
        for p in [1usize, 3, 10] {
            let mut session = StreamSession::new(&s);
            bfs_deterministic(&mut session, 0, p)?;
            let ratio = session.passes() as f64 / p as f64;
            det_worst = det_worst.max(ratio);
            ok &= ratio <= 8.0;
        }
        for k in [1usize, 4, 16] {
            let out = dfs_simple(&mut StreamSession::new(&s), 0, k, *seed)?;
            let slack = out.passes as i64 - out.tree.height().div_ceil(k) as i64;
            simple_worst = simple_worst.max(slack);
            ok &= slack <= 1;
        }
    }
    outcome(
        ok,
        format!(
            "bfs_randomized passes - 2(2h-1) <= {rand_worst} (allowed log2 n); bfs_deterministic passes/p <= {det_worst:.2} (allowed 8); dfs_simple passes - ceil(h/k) <= {simple_worst} (allowed 1)"
        ),
    )
}

fn congestion() -> Result<Outcome> {
    let n = 500;
    let mut within = 0;
    let mut sampled = 0;
    let mut worst = 0.0f64;
    for run in 0..20u64 {
        let (s, _) = graph(&Generator::Gnp { n, p: 0.02 }, 7 + run)?;
        let k = (n as f64).sqrt().ceil() as usize * (n as f64).ln().ceil() as usize;
        let cfg = BfsConfig { record_congestion: true, ..BfsConfig::new(k, run) };
        let stats = match bfs_randomized(&mut StreamSession::new(&s), 0, &cfg) {
            Ok((_, stats)) => stats,
            Err(e) if e.is_retryable() => continue,
            Err(e) => return Err(e),
        };
        let limit = 6.0 * (n as f64).ln().max(stats.centers as f64 / stats.h as f64);
        let mut r = rng(run, "congestion-sample");
        let passes = stats.congestion.len();
        if passes == 0 {
            continue;
        }
        for _ in 0..50 {
            let t = r.gen_range(0..passes);
            let v = r.gen_range(0..n);
            let c = stats.congestion[t][v] as f64;
            sampled += 1;
            worst = worst.max(c / limit);
            if c <= limit {
                within += 1;
            }
        }
    }
    outcome(
        sampled == 1000 && 100 * within >= 99 * sampled,
        format!("{within}/{sampled} sampled (node, pass) pairs within 6 max(ln n, |U|/h) (need 99%); max count/limit {worst:.3}"),
    )
}

fn diameter() -> Result<Outcome> {
    let mut ok_runs = 0;
    let mut violations = 0;
    for i in 0..100u64 {
        let n = 20 + (i as usize * 31) % 131;
        let (s, g) = graph(&mixed_gnp(n, i), 2000 + i)?;
        let d = exact_distances(&g, &(0..n).collect::<Vec<_>>())
            .into_iter()
            .flatten()
            .map(|x| x.unwrap())
            .max()
            .unwrap();
        match diameter_approx(&mut StreamSession::new(&s), &BfsConfig::new((n / 3).max(1), i)) {
            Ok(r) => {
                ok_runs += 1;
                if r.estimate > d || 3 * r.estimate < 2 * d - (2 * d) % 3 {
                    violations += 1;
                }
            }
            Err(e) if e.is_retryable() => {}
            Err(e) => return Err(e),
        }
    }
    outcome(ok_runs >= 95 && violations == 0, format!("{ok_runs}/100 successful runs (need 95), {violations} outside [floor(2D/3), D]"))
}

fn steiner() -> Result<Outcome> {
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for i in 0..30u64 {
        let n = 8 + (i as usize * 5) % 18;
        let (s, g) = graph(&mixed_gnp(n, i), 3000 + i)?;
        let mut r = rng(i, "terminals");
        let size = 2 + (i as usize) % 5;
        let mut terms: Vec<Node> = (0..size).map(|_| r.gen_range(0..n)).collect();
        terms.sort_unstable();
        terms.dedup();
        let edges = with_retries(i, 5, |seed| steiner_2approx(&mut StreamSession::new(&s), &terms, &BfsConfig::new((n / 2).max(1), seed)))?;
        let opt = steiner_opt(&g, &terms)?;
        if !is_steiner_tree(&g, &edges, &terms) || edges.len() > 2 * opt {
            violations += 1;
        }
        if opt > 0 {
            worst = worst.max(edges.len() as f64 / opt as f64);
        }
    }
    outcome(violations == 0, format!("{violations} violations over 30 instances, worst cost/OPT {worst:.2}"))
}

fn is_steiner_tree(g: &AdjacencyGraph, edges: &[Edge], terms: &[Node]) -> bool {
    if terms.len() <= 1 {
        return edges.is_empty() || edges.iter().all(|e| g.has_edge(e.u, e.v));
    }
    let mut nodes: Vec<Node> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let Ok(h) = AdjacencyGraph::from_edges(g.n(), edges.iter().copied()) else { return false };
    edges.len() + 1 == nodes.len()
        && h.is_subgraph_of(g)
        && h.set_is_connected(&nodes)
        && terms.iter().all(|t| nodes.binary_search(t).is_ok())
}

/// Lowest common ancestor depth test on one dfs_simple level: every graph
/// edge inside the level joins two nodes whose LCA is one of them or lies
/// at depth k or more.
fn level_respects_layers(g: &AdjacencyGraph, level: &SimpleLevel, k: usize) -> bool {
    let mut local = vec![usize::MAX; g.n()];
    for (i, &x) in level.nodes.iter().enumerate() {
        local[x] = i;
    }
    let up = |x: usize| level.parent[x].map(|p| local[p]);
    for &x in &level.nodes {
        for &y in g.neighbors(x) {
            if local[y] == usize::MAX || y < x {
                continue;
            }
            let (mut a, mut b) = (local[x], local[y]);
            while level.depth[a] > level.depth[b] {
                a = up(a).unwrap();
            }
            while level.depth[b] > level.depth[a] {
                b = up(b).unwrap();
            }
            while a != b {
                a = up(a).unwrap();
                b = up(b).unwrap();
            }
            if a != local[x] && a != local[y] && level.depth[a] < k {
                return false;
            }
        }
    }
    true
}

fn dfs_validity() -> Result<Outcome> {
    let mut invalid = 0;
    let mut lemma = 0;
    let mut levels_checked = 0;
    let mut turnstile_runs = 0;
    for i in 0..100u64 {
        let n = 10 + (i as usize * 23) % 111;
        let (s, g) = graph(&mixed_gnp(n, i), 4000 + i)?;
        let root = (i as usize * 7) % n;
        let k = 1 + (i as usize) % 7;
        let stream = if i % 10 == 0 && n <= 40 {
            turnstile_runs += 1;
            s.with_churn(i, n)?
        } else {
            s
        };
        let simple = dfs_simple(&mut StreamSession::new(&stream), root, k, i)?;
        if !is_dfs_tree(&g, &simple.tree) {
            invalid += 1;
        }
        if n <= 60 {
            for level in &simple.levels {
                levels_checked += 1;
                if !level_respects_layers(&g, level, k) {
                    lemma += 1;
                }
            }
        }
        let ka = (2 + i as usize % 10).min(n);
        let sa = 1 + (i as usize) % ka;
        let aa = dfs_aa(&mut StreamSession::new(&stream), root, ka, sa, i)?;
        if !is_dfs_tree(&g, &aa.tree) {
            invalid += 1;
        }
    }
    outcome(
        invalid == 0 && lemma == 0,
        format!("{invalid} invalid trees over 200 runs ({turnstile_runs} turnstile graphs); {lemma} layer violations over {levels_checked} levels"),
    )
}

/// Random MaximalPaths instance on `g`: disjoint random walks as input
/// paths, a few random sink groups, a few excluded nodes.
pub fn random_paths_instance(g: &AdjacencyGraph, seed: u64) -> MaximalPathsInstance {
    let mut r = rng(seed, "paths-instance");
    let n = g.n();
    let mut used = vec![false; n];
    let mut paths = Vec::new();
    for _ in 0..n / 5 {
        let start = r.gen_range(0..n);
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut p = vec![start];
        for _ in 0..r.gen_range(0..4) {
            let x = *p.last().unwrap();
            let free: Vec<Node> = g.neighbors(x).iter().copied().filter(|&y| !used[y]).collect();
            if free.is_empty() {
                break;
            }
            let y = free[r.gen_range(0..free.len())];
            used[y] = true;
            p.push(y);
        }
        paths.push(p);
    }
    let mut sinks = Vec::new();
    for _ in 0..n / 8 {
        let size = r.gen_range(1..4);
        let mut group = Vec::new();
        for _ in 0..size {
            let x = r.gen_range(0..n);
            if !std::mem::replace(&mut used[x], true) {
                group.push(x);
            }
        }
        group.sort_unstable();
        if !group.is_empty() {
            sinks.push(group);
        }
    }
    let mut inst = MaximalPathsInstance::new(n, paths, &sinks);
    for x in 0..n {
        if !used[x] && r.gen_bool(0.05) {
            inst.excluded[x] = true;
        }
    }
    inst
}

fn maximal_paths_contract() -> Result<Outcome> {
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let n = 20 + (i as usize * 11) % 41;
        let (s, g) = graph(&Generator::Gnp { n, p: 2.5 / n as f64 }, 5000 + i)?;
        let inst = random_paths_instance(&g, i);
        let k = 1 + (i as usize) % 4;
        let stream = if i % 5 == 0 { s.with_churn(i, n)? } else { s };
        let r = maximal_paths(&mut StreamSession::new(&stream), &inst, k, 1 + (i as usize) % k, i)?;
        let limit = 2.0 * n as f64 / k as f64;
        worst = worst.max(r.stage1_iterations as f64 / limit);
        if !output_well_formed(&g, &inst, &r.paths) || !maximality_check(&g, &inst, &r.paths) || r.stage1_iterations as f64 > limit {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations over 20 instances, max stage-1 iterations/(2n/k) {worst:.2}"))
}

fn certificates() -> Result<Outcome> {
    let mut forest_bad = 0;
    let mut pairs = 0;
    for (i, n) in [12usize, 20, 30, 40].into_iter().enumerate() {
        let (s, g) = graph(&Generator::Gnp { n, p: 0.25 }, 6000 + i as u64)?;
        for cs in 1..=4usize {
            let first_fit = edge_certificate_insertion(&mut StreamSession::new(&s), cs)?;
            let scan_first = vc_certificate(&mut StreamSession::new(&s), cs, 0)?;
            for cert in [first_fit, scan_first] {
                let k = AdjacencyGraph::from_edges(n, cert.edges.iter().copied())?;
                for u in 0..n {
                    for v in u + 1..n {
                        pairs += 1;
                        if edge_connectivity(&g, u, v)?.min(cs) != edge_connectivity(&k, u, v)?.min(cs) {
                            forest_bad += 1;
                        }
                    }
                }
            }
        }
    }
    let runs = 50;
    let mut good_runs = 0;
    for run in 0..runs as u64 {
        let n = 20 + (run as usize * 13) % 41;
        let (s, g) = graph(&Generator::Gnp { n, p: 0.15 }, 7000 + run)?;
        let turn = s.with_churn(run, n)?;
        let cs = 1 + (run as usize) % 3;
        let Ok(cert) = vc_certificate(&mut StreamSession::new(&turn), cs, run) else { continue };
        let k = AdjacencyGraph::from_edges(n, cert.edges.iter().copied())?;
        let mut r = rng(run, "cert-pairs");
        let mut fine = k.is_subgraph_of(&g);
        for _ in 0..50 {
            let u = r.gen_range(0..n);
            let v = (u + r.gen_range(1..n)) % n;
            fine &= node_connectivity(&g, u, v)?.min(cs) == node_connectivity(&k, u, v)?.min(cs);
        }
        if fine {
            good_runs += 1;
        }
    }
    outcome(
        forest_bad == 0 && 100 * good_runs >= 98 * runs,
        format!("forest decompositions {forest_bad} mismatches over {pairs} (certificate, pair) checks; stacked sketch {good_runs}/{runs} runs exact on 50 pairs (need 98%)"),
    )
}

/// Upper 1% points of the chi-square distribution.
fn chi2_critical_99(df: usize) -> f64 {
    match df {
        3 => 11.345,
        7 => 18.475,
        15 => 30.578,
        _ => f64::NAN,
    }
}

fn sketch_statistics() -> Result<Outcome> {
    let universe = 1u64 << 20;
    let queries = 10_000;
    let mut chi_ok = true;
    let mut stats = Vec::new();
    for size in [4usize, 8, 16] {
        let mut r = rng(size as u64, "support");
        let mut support: Vec<u64> = Vec::new();
        while support.len() < size {
            let x = r.gen_range(0..universe);
            if !support.contains(&x) {
                support.push(x);
            }
        }
        let mut counts = vec![0usize; size];
        let mut answered = 0;
        for q in 0..queries {
            let mut sk = L0Sketch::with_seed(universe, derive(size as u64, "uniformity", q));
            for &x in &support {
                sk.update(x, 1 + (x % 3) as i64);
            }
            if let L0Query::Index(x) = sk.query() {
                if let Some(i) = support.iter().position(|&y| y == x) {
                    counts[i] += 1;
                    answered += 1;
                }
            }
        }
        let expect = answered as f64 / size as f64;
        let chi: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        let crit = chi2_critical_99(size - 1);
        chi_ok &= chi <= crit && answered * 10 >= queries * 9;
        stats.push(format!("|S|={size}: chi2 {chi:.1} <= {crit}"));
    }
    let mut linear_bad = 0;
    for seq in 0..1000u64 {
        let mut r = rng(seq, "linearity");
        let seed = derive(seq, "linearity-sketch", 0);
        let ups: Vec<(u64, i64)> = (0..r.gen_range(1..40)).map(|_| (r.gen_range(0..universe), r.gen_range(-3i64..=3))).collect();
        let mut a = L0Sketch::with_seed(universe, seed);
        let mut b = L0Sketch::with_seed(universe, seed);
        let mut whole = L0Sketch::with_seed(universe, seed);
        for (j, &(x, d)) in ups.iter().enumerate() {
            if j % 2 == 0 { &mut a } else { &mut b }.update(x, d);
            whole.update(x, d);
        }
        a.add(&b)?;
        let same = a.to_bytes() == whole.to_bytes();
        for &(x, d) in ups.iter().rev() {
            whole.update(x, -d);
        }
        if !same || whole.to_bytes() != L0Sketch::with_seed(universe, seed).to_bytes() {
            linear_bad += 1;
        }
    }
    outcome(chi_ok && linear_bad == 0, format!("{}; linearity {linear_bad}/1000 sequences not bit-exact", stats.join(", ")))
}

fn connected_cut() -> Result<Outcome> {
    let mut disconnected = 0;
    let mut weak = 0;
    let mut worst = f64::INFINITY;
    for gi in 0..5u64 {
        let (s, g) = graph(&Generator::RandomRegular { n: 12, d: 4 }, 8000 + gi)?;
        let opt = connected_max_cut_exact(&g)?;
        let mut best = 0;
        for seed in 0..200u64 {
            let cut = connected_max_cut(&mut StreamSession::new(&s), 1.0, derive(gi, "cut", seed))?;
            if !g.set_is_connected(&cut.right) {
                disconnected += 1;
            }
            best = best.max(cut.cut_value);
        }
        worst = worst.min(best as f64 / opt as f64);
        if (best as f64) * 8.5 < opt as f64 {
            weak += 1;
        }
    }
    outcome(
        disconnected == 0 && weak == 0,
        format!("{disconnected} disconnected V\\L sides over 1000 samples; best-of-200 / OPT >= {worst:.3} on 5 graphs (need 1/8.5)"),
    )
}
