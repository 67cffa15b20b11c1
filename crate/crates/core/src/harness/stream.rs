use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Edge, Node};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    InsertionOnly,
    Turnstile,
}

impl Model {
    pub fn tag(self) -> &'static str {
        match self {
            Model::InsertionOnly => "ins",
            Model::Turnstile => "turn",
        }
    }
}

/// One signed edge update. `sign` is +1 for an insertion and -1 for a deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeUpdate {
    pub u: Node,
    pub v: Node,
    pub sign: i8,
}

impl EdgeUpdate {
    pub fn insert(u: Node, v: Node) -> Self {
        EdgeUpdate { u, v, sign: 1 }
    }

    pub fn delete(u: Node, v: Node) -> Self {
        EdgeUpdate { u, v, sign: -1 }
    }

    pub fn edge(&self) -> Edge {
        Edge::new(self.u, self.v)
    }
}

/// An immutable, validated edge stream.
///
/// Algorithms never look at `updates` directly; they read it through
/// [`StreamSession`](super::StreamSession) passes so that every traversal is metered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStream {
    n: usize,
    model: Model,
    updates: Vec<EdgeUpdate>,
}

impl GraphStream {
    /// Validates ids, signs, and that every running multiplicity stays in {0, 1}.
    pub fn new(n: usize, model: Model, updates: Vec<EdgeUpdate>) -> Result<Self> {
        let mut mult: HashMap<Edge, i8> = HashMap::new();
        for (i, up) in updates.iter().enumerate() {
            if up.u >= n || up.v >= n {
                return Err(Error::MalformedStream(format!(
                    "update {i}: node id out of range (n = {n})"
                )));
            }
            if up.u == up.v {
                return Err(Error::MalformedStream(format!("update {i}: self-loop at {}", up.u)));
            }
            match (model, up.sign) {
                (_, 1) => {}
                (Model::Turnstile, -1) => {}
                (Model::InsertionOnly, -1) => {
                    return Err(Error::MalformedStream(format!(
                        "update {i}: deletion in an insertion-only stream"
                    )))
                }
                (_, s) => return Err(Error::MalformedStream(format!("update {i}: bad sign {s}"))),
            }
            let m = mult.entry(up.edge()).or_insert(0);
            *m += up.sign;
            if *m < 0 || *m > 1 {
                return Err(Error::MalformedStream(format!(
                    "update {i}: multiplicity of ({}, {}) leaves {{0, 1}}",
                    up.u, up.v
                )));
            }
        }
        Ok(GraphStream { n, model, updates })
    }

    /// Insertion-only stream listing the edges of `g` in edge order.
    pub fn from_graph(g: &AdjacencyGraph) -> Self {
        let updates = g.edges().map(|e| EdgeUpdate::insert(e.u, e.v)).collect();
        GraphStream { n: g.n(), model: Model::InsertionOnly, updates }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let updates = edges.into_iter().map(|e| EdgeUpdate::insert(e.u, e.v)).collect();
        GraphStream::new(n, Model::InsertionOnly, updates)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    pub(crate) fn updates(&self) -> &[EdgeUpdate] {
        &self.updates
    }

    /// Oracle-side view of the final graph. Never called inside metered algorithms.
    pub fn materialize(&self) -> Result<AdjacencyGraph> {
        let mut mult: HashMap<Edge, i32> = HashMap::new();
        for up in &self.updates {
            *mult.entry(up.edge()).or_insert(0) += up.sign as i32;
        }
        let mut edges = Vec::new();
        for (e, m) in mult {
            match m {
                0 => {}
                1 => edges.push(e),
                _ => return Err(Error::MalformedStream(format!("final multiplicity {m} for {e:?}"))),
            }
        }
        edges.sort_unstable();
        AdjacencyGraph::from_edges(self.n, edges)
    }

    /// Re-encodes the same final graph as a turnstile stream with churn:
    /// shuffled order, some edges inserted, deleted and reinserted, and
    /// `extra` transient non-edges that are inserted and later deleted.
    pub fn with_churn(&self, seed: u64, extra: usize) -> Result<GraphStream> {
        let g = self.materialize()?;
        let mut r = rng::rng(seed, "churn");
        let mut scripts: Vec<(Edge, Vec<i8>)> = g
            .edges()
            .map(|e| {
                let ops = if r.gen_bool(0.3) { vec![1, -1, 1] } else { vec![1] };
                (e, ops)
            })
            .collect();
        let n = self.n;
        if n >= 2 {
            let mut added = 0;
            let mut tries = 0;
            let mut used = std::collections::HashSet::new();
            while added < extra && tries < 20 * extra + 100 {
                tries += 1;
                let a = r.gen_range(0..n);
                let b = r.gen_range(0..n);
                if a == b || g.has_edge(a, b) || !used.insert(Edge::new(a, b)) {
                    continue;
                }
                scripts.push((Edge::new(a, b), vec![1, -1]));
                added += 1;
            }
        }
        // Interleave: give every op a random key, then hand the sorted keys
        // of each script out in order so per-edge order is preserved.
        let mut keyed: Vec<(u64, usize)> = Vec::new();
        for (i, (_, ops)) in scripts.iter().enumerate() {
            for _ in ops {
                keyed.push((r.gen(), i));
            }
        }
        keyed.sort_unstable();
        let mut cursor = vec![0usize; scripts.len()];
        let mut updates = Vec::with_capacity(keyed.len());
        for &(_, i) in &keyed {
            let (e, ops) = &scripts[i];
            let sign = ops[cursor[i]];
            cursor[i] += 1;
            // Randomize endpoint order too; the stream should not leak u < v.
            let (a, b) = if r.gen_bool(0.5) { (e.u, e.v) } else { (e.v, e.u) };
            updates.push(EdgeUpdate { u: a, v: b, sign });
        }
        GraphStream::new(n, Model::Turnstile, updates)
    }

    /// Same updates in a seeded random order (insertion-only streams only).
    pub fn shuffled(&self, seed: u64) -> GraphStream {
        let mut updates = self.updates.clone();
        if self.model == Model::InsertionOnly {
            updates.shuffle(&mut rng::rng(seed, "shuffle"));
        }
        GraphStream { n: self.n, model: self.model, updates }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turnstile_final_graph() {
        let s = GraphStream::new(
            3,
            Model::Turnstile,
            vec![EdgeUpdate::insert(0, 1), EdgeUpdate::insert(0, 2), EdgeUpdate::delete(0, 1)],
        )
        .unwrap();
        let g = s.materialize().unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![Edge::new(0, 2)]);
    }

    #[test]
    fn duplicate_insert_is_malformed() {
        let r = GraphStream::new(
            2,
            Model::InsertionOnly,
            vec![EdgeUpdate::insert(0, 1), EdgeUpdate::insert(1, 0)],
        );
        assert!(matches!(r, Err(Error::MalformedStream(_))));
    }

    #[test]
    fn churn_preserves_graph() {
        let g = AdjacencyGraph::from_edges(5, [Edge::new(0, 1), Edge::new(1, 2), Edge::new(3, 4)]).unwrap();
        let s = GraphStream::from_graph(&g).with_churn(3, 6).unwrap();
        assert_eq!(s.model(), Model::Turnstile);
        assert!(s.len() > 3);
        assert_eq!(s.materialize().unwrap(), g);
    }
}
