//! Sparse connectivity certificates and degree truncation.
//!
//! All builders are pass consumers over local node ids, so they can run on
//! the whole stream or on one part of a [`Hub`](crate::harness::Hub).

use std::rc::Rc;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Node, UnionFind};
use crate::harness::{Consumer, Model, StreamSession};
use crate::rng::{derive, splitmix64};
use crate::sketch::{ceil_log2, Cell, ForestSketch, L0Params, L0Query};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    ForestDecomposition,
    StackedSketch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub s: usize,
    pub edges: Vec<Edge>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeTruncation {
    pub k: usize,
    pub edges: Vec<Edge>,
}

/// Optional node mask: edges with an endpoint outside the mask are ignored.
pub type NodeMask = Option<Rc<Vec<bool>>>;

fn inside(mask: &NodeMask, a: usize, b: usize) -> bool {
    mask.as_ref().is_none_or(|m| m[a] && m[b])
}

/// Union of `s` scan-first forests, each of the edges left by the previous
/// ones. Scanning is breadth-first from the lowest unvisited id.
pub fn scan_first_forests(n: usize, edges: &[Edge], s: usize) -> Vec<Edge> {
    let mut adj: Vec<Vec<(Node, usize)>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        adj[e.u].push((e.v, i));
        adj[e.v].push((e.u, i));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut used = vec![false; edges.len()];
    let mut out = Vec::new();
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for _ in 0..s {
        seen.iter_mut().for_each(|x| *x = false);
        let before = out.len();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            while let Some(x) = queue.pop_front() {
                for &(y, i) in &adj[x] {
                    if !used[i] && !seen[y] {
                        seen[y] = true;
                        used[i] = true;
                        out.push(edges[i]);
                        queue.push_back(y);
                    }
                }
            }
        }
        if out.len() == before {
            break;
        }
    }
    out.sort_unstable();
    out
}

/// One-pass strong s-VC certificate for insertion-only streams.
///
/// Edges are buffered; whenever the buffer exceeds 2sn edges it is replaced
/// by its own scan-first certificate, so the buffer never holds more than
/// about 3sn edges.
pub struct InsertionCert {
    n: usize,
    s: usize,
    mask: NodeMask,
    buffer: Vec<Edge>,
}

impl InsertionCert {
    pub fn new(n: usize, s: usize, mask: NodeMask) -> Self {
        InsertionCert { n, s: s.max(1), mask, buffer: Vec::new() }
    }

    pub fn finish(self) -> Certificate {
        Certificate { s: self.s, edges: scan_first_forests(self.n, &self.buffer, self.s), provenance: Provenance::ForestDecomposition }
    }
}

impl Consumer for InsertionCert {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        debug_assert_eq!(sign, 1);
        if !inside(&self.mask, a, b) {
            return;
        }
        self.buffer.push(Edge::new(a, b));
        if self.buffer.len() > 2 * self.s * self.n.max(1) {
            self.buffer = scan_first_forests(self.n, &self.buffer, self.s);
        }
    }

    fn words(&self) -> usize {
        2 * self.buffer.len()
    }
}

pub fn turnstile_layers(n: usize, s: usize) -> usize {
    let s = s.max(1);
    s * (s + 2 * ceil_log2(n.max(2) as u64))
}

/// One-pass strong s-VC certificate for turnstile streams.
///
/// Layer i sketches G[V_i], where V_0 = V and later V_i keep each node with
/// probability 2/(s+1). Decoding walks the layers in order; each layer first
/// subtracts the edges kept so far, then contributes a spanning forest of
/// what remains.
pub struct TurnstileCert {
    s: usize,
    members: Vec<Vec<bool>>,
    layers: Vec<ForestSketch>,
    mask: NodeMask,
}

impl TurnstileCert {
    pub fn new(n: usize, s: usize, seed: u64, mask: NodeMask) -> Self {
        let s = s.max(1);
        let count = if s == 1 { 1 } else { turnstile_layers(n, s) };
        let p = 2.0 / (s as f64 + 1.0);
        let threshold = (p * u64::MAX as f64) as u64;
        let members = (0..count)
            .map(|i| {
                (0..n)
                    .map(|x| i == 0 || splitmix64(derive(seed, "cert-layer", i as u64) ^ x as u64) <= threshold)
                    .collect()
            })
            .collect();
        let layers = (0..count).map(|i| ForestSketch::new(n, derive(seed, "cert-sketch", i as u64))).collect();
        TurnstileCert { s, members, layers, mask }
    }

    pub fn finish(self) -> Result<Certificate> {
        let mut kept: Vec<Edge> = Vec::new();
        for (mut sk, member) in self.layers.into_iter().zip(&self.members) {
            let inner: Vec<Edge> = kept.iter().copied().filter(|e| member[e.u] && member[e.v]).collect();
            sk.peel(&inner);
            kept.extend(sk.decode()?);
        }
        kept.sort_unstable();
        kept.dedup();
        Ok(Certificate { s: self.s, edges: kept, provenance: Provenance::StackedSketch })
    }
}

impl Consumer for TurnstileCert {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        if !inside(&self.mask, a, b) {
            return;
        }
        for (sk, member) in self.layers.iter_mut().zip(&self.members) {
            if member[a] && member[b] {
                sk.update(a, b, sign);
            }
        }
    }

    fn words(&self) -> usize {
        self.layers.iter().map(ForestSketch::words).sum()
    }
}

/// Certificate builder for either model.
pub enum CertBuilder {
    Insertion(InsertionCert),
    Turnstile(TurnstileCert),
}

impl CertBuilder {
    pub fn new(model: Model, n: usize, s: usize, seed: u64, mask: NodeMask) -> Self {
        match model {
            Model::InsertionOnly => CertBuilder::Insertion(InsertionCert::new(n, s, mask)),
            Model::Turnstile => CertBuilder::Turnstile(TurnstileCert::new(n, s, seed, mask)),
        }
    }

    pub fn finish(self) -> Result<Certificate> {
        match self {
            CertBuilder::Insertion(b) => Ok(b.finish()),
            CertBuilder::Turnstile(b) => b.finish(),
        }
    }
}

impl Consumer for CertBuilder {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        match self {
            CertBuilder::Insertion(c) => c.update(a, b, sign),
            CertBuilder::Turnstile(c) => c.update(a, b, sign),
        }
    }

    fn words(&self) -> usize {
        match self {
            CertBuilder::Insertion(c) => c.words(),
            CertBuilder::Turnstile(c) => c.words(),
        }
    }
}

pub(crate) fn run_pass<C: Consumer>(session: &mut StreamSession<'_>, mut c: C) -> Result<C> {
    for up in session.pass() {
        c.update(up.u, up.v, up.sign as i64);
    }
    session.charge(c.words())?;
    Ok(c)
}

pub fn vc_certificate_insertion(session: &mut StreamSession<'_>, s: usize) -> Result<Certificate> {
    require(session.model() == Model::InsertionOnly, "insertion-only certificate needs an insertion-only stream")?;
    Ok(run_pass(session, InsertionCert::new(session.n(), s, None))?.finish())
}

pub fn vc_certificate_turnstile(session: &mut StreamSession<'_>, s: usize, seed: u64) -> Result<Certificate> {
    run_pass(session, TurnstileCert::new(session.n(), s, seed, None))?.finish()
}

pub fn vc_certificate(session: &mut StreamSession<'_>, s: usize, seed: u64) -> Result<Certificate> {
    match session.model() {
        Model::InsertionOnly => vc_certificate_insertion(session, s),
        Model::Turnstile => vc_certificate_turnstile(session, s, seed),
    }
}

/// First-fit forest decomposition: each edge joins the first of `s` forests
/// in which its endpoints are still apart. Preserves min(s, λ(u, v)).
pub fn edge_certificate_insertion(session: &mut StreamSession<'_>, s: usize) -> Result<Certificate> {
    require(session.model() == Model::InsertionOnly, "forest decomposition needs an insertion-only stream")?;
    let n = session.n();
    let mut forests: Vec<UnionFind> = (0..s).map(|_| UnionFind::new(n)).collect();
    let mut edges = Vec::new();
    for up in session.pass() {
        for f in forests.iter_mut() {
            if f.union(up.u, up.v) {
                edges.push(up.edge());
                break;
            }
        }
    }
    session.charge(2 * edges.len() + 2 * s * n)?;
    edges.sort_unstable();
    Ok(Certificate { s, edges, provenance: Provenance::ForestDecomposition })
}

fn require(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(msg.into()))
    }
}

/// Keeps the first k incident edges per node; an edge is kept when either
/// endpoint still has quota.
pub struct InsertionTruncation {
    k: usize,
    count: Vec<usize>,
    edges: Vec<Edge>,
}

impl Consumer for InsertionTruncation {
    fn update(&mut self, a: usize, b: usize, _sign: i64) {
        if self.count[a] < self.k || self.count[b] < self.k {
            self.count[a] += 1;
            self.count[b] += 1;
            self.edges.push(Edge::new(a, b));
        }
    }

    fn words(&self) -> usize {
        self.count.len() + 2 * self.edges.len()
    }
}

const TRUNC_REPS: usize = 3;

/// Turnstile truncation: per node and round, neighbors are hashed into
/// 2*min(k, n) buckets, each an ℓ0 sampler; a signed counter tracks the
/// true degree.
pub struct TurnstileTruncation {
    n: usize,
    k: usize,
    seed: u64,
    buckets: usize,
    rounds: Vec<Arc<L0Params>>,
    block: usize,
    cells: Vec<Cell>,
    degree: Vec<i64>,
}

/// Largest sketch state, in words, that a single consumer may allocate.
pub const MAX_SKETCH_WORDS: usize = 1 << 28;

fn truncation_rounds(n: usize) -> usize {
    2 * ceil_log2(n.max(2) as u64) + 2
}

/// Words a truncation consumer allocates up front for `n` nodes and
/// degree `k`. The insertion-only builder grows as it goes.
pub fn truncation_words(model: Model, n: usize, k: usize) -> usize {
    match model {
        Model::InsertionOnly => 0,
        Model::Turnstile => {
            let cells = L0Params::new(n.max(2) as u64, 0, TRUNC_REPS).cells();
            (n * truncation_rounds(n)).saturating_mul(2 * k.min(n).max(1)).saturating_mul(cells * 4) + n
        }
    }
}

/// Charges `words` up front so oversized sketch state fails before it is
/// allocated: against the session budget, and always against
/// [`MAX_SKETCH_WORDS`].
pub fn reserve(session: &mut StreamSession<'_>, words: usize) -> Result<()> {
    if words > MAX_SKETCH_WORDS {
        return Err(Error::BudgetExceeded { peak: words, budget: MAX_SKETCH_WORDS });
    }
    session.charge(words)
}

impl TurnstileTruncation {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        let buckets = 2 * k.min(n).max(1);
        let rounds: Vec<_> = (0..truncation_rounds(n))
            .map(|j| L0Params::new(n.max(2) as u64, derive(seed, "trunc-round", j as u64), TRUNC_REPS))
            .collect();
        let block = rounds[0].cells();
        let cells = vec![Cell::default(); n * rounds.len() * buckets * block];
        TurnstileTruncation { n, k, seed, buckets, rounds, block, cells, degree: vec![0; n] }
    }

    fn bucket(&self, round: usize, y: usize) -> usize {
        (splitmix64(derive(self.seed, "trunc-bucket", round as u64) ^ y as u64) % self.buckets as u64) as usize
    }

    fn add(&mut self, x: usize, y: usize, sign: i64) {
        self.degree[x] += sign;
        let nr = self.rounds.len();
        for j in 0..nr {
            let at = ((x * nr + j) * self.buckets + self.bucket(j, y)) * self.block;
            self.rounds[j].apply(&mut self.cells[at..at + self.block], y as u64, sign);
        }
    }

    pub fn finish(self) -> Result<DegreeTruncation> {
        let nr = self.rounds.len();
        let mut chosen = Vec::new();
        for x in 0..self.n {
            let want = (self.degree[x].max(0) as usize).min(self.k);
            let mut got: Vec<usize> = Vec::new();
            'rounds: for j in 0..nr {
                for b in 0..self.buckets {
                    let at = ((x * nr + j) * self.buckets + b) * self.block;
                    if let L0Query::Index(y) = self.rounds[j].query_cells(&self.cells[at..at + self.block]) {
                        let y = y as usize;
                        if y != x && y < self.n && !got.contains(&y) {
                            got.push(y);
                            if got.len() == want {
                                break 'rounds;
                            }
                        }
                    }
                }
            }
            if got.len() < want {
                return Err(Error::Retryable(format!("degree truncation recovered {} of {want} neighbours of node {x}", got.len())));
            }
            chosen.extend(got.into_iter().map(|y| Edge::new(x, y)));
        }
        chosen.sort_unstable();
        chosen.dedup();
        Ok(DegreeTruncation { k: self.k, edges: chosen })
    }
}

impl Consumer for TurnstileTruncation {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        self.add(a, b, sign);
        self.add(b, a, sign);
    }

    fn words(&self) -> usize {
        self.cells.len() * 4 + self.n
    }
}

pub enum TruncationBuilder {
    Insertion(InsertionTruncation),
    Turnstile(TurnstileTruncation),
}

impl TruncationBuilder {
    pub fn new(model: Model, n: usize, k: usize, seed: u64) -> Self {
        match model {
            Model::InsertionOnly => TruncationBuilder::Insertion(InsertionTruncation { k, count: vec![0; n], edges: Vec::new() }),
            Model::Turnstile => TruncationBuilder::Turnstile(TurnstileTruncation::new(n, k, seed)),
        }
    }

    pub fn finish(self) -> Result<DegreeTruncation> {
        match self {
            TruncationBuilder::Insertion(t) => {
                let mut edges = t.edges;
                edges.sort_unstable();
                Ok(DegreeTruncation { k: t.k, edges })
            }
            TruncationBuilder::Turnstile(t) => t.finish(),
        }
    }
}

impl Consumer for TruncationBuilder {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        match self {
            TruncationBuilder::Insertion(t) => t.update(a, b, sign),
            TruncationBuilder::Turnstile(t) => t.update(a, b, sign),
        }
    }

    fn words(&self) -> usize {
        match self {
            TruncationBuilder::Insertion(t) => t.words(),
            TruncationBuilder::Turnstile(t) => t.words(),
        }
    }
}

pub fn degree_truncate(session: &mut StreamSession<'_>, k: usize, seed: u64) -> Result<DegreeTruncation> {
    if k == 0 {
        return Err(Error::Parameter("degree quota k must be at least 1".into()));
    }
    reserve(session, truncation_words(session.model(), session.n(), k))?;
    let b = TruncationBuilder::new(session.model(), session.n(), k, seed);
    run_pass(session, b)?.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, Generator, GraphStream};

    #[test]
    fn path_certificate_is_the_path() {
        let s = generate(&Generator::Path(7), 0).unwrap();
        for k in 1..4 {
            let c = vc_certificate_insertion(&mut StreamSession::new(&s), k).unwrap();
            assert_eq!(c.edges.len(), 6);
        }
    }

    #[test]
    fn k5_with_s4_keeps_everything() {
        let s = generate(&Generator::Complete(5), 0).unwrap();
        assert_eq!(vc_certificate_insertion(&mut StreamSession::new(&s), 4).unwrap().edges.len(), 10);
        assert_eq!(edge_certificate_insertion(&mut StreamSession::new(&s), 4).unwrap().edges.len(), 10);
    }

    #[test]
    fn star_truncation_keeps_leaf_edges() {
        let s = generate(&Generator::Star(6), 0).unwrap();
        let t = degree_truncate(&mut StreamSession::new(&s), 2, 0).unwrap();
        assert_eq!(t.edges.len(), 5);
        let turn = s.with_churn(1, 5).unwrap();
        let t = degree_truncate(&mut StreamSession::new(&turn), 2, 3).unwrap();
        assert_eq!(t.edges.len(), 5);
    }

    #[test]
    fn empty_turnstile_certificate() {
        let s = GraphStream::new(4, Model::Turnstile, vec![]).unwrap();
        assert!(vc_certificate_turnstile(&mut StreamSession::new(&s), 2, 0).unwrap().edges.is_empty());
    }
}
