use serde::Serialize;

use crate::cert::{run_pass, TruncationBuilder};
use crate::error::{Error, Result};
use crate::graph::{Edge, UnionFind};
use crate::harness::{Consumer, Model, StreamSession};
use crate::sketch::ForestSketch;

/// Smallest truncation degree for which the leaf guarantee is proven.
pub const MIN_GUARANTEED_K: usize = 186;

/// The leaf loss factor 30 (1 + ln(k+1)) / (k+1).
pub fn sparsifier_bound(k: usize) -> f64 {
    let k1 = (k + 1) as f64;
    30.0 * (1.0 + k1.ln()) / k1
}

/// Smallest k >= 186 whose loss factor is at most `epsilon`.
pub fn k_for_epsilon(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut k = MIN_GUARANTEED_K;
    while sparsifier_bound(k) > epsilon {
        k += 1;
    }
    Ok(k)
}

#[derive(Debug, Clone, Serialize)]
pub struct SparsifierResult {
    pub epsilon: f64,
    pub k: usize,
    /// S_k(G) together with the spanning tree, sorted.
    pub edges: Vec<Edge>,
    pub tree_backbone: Vec<Edge>,
    /// Degree of every node in G, counted during the same pass.
    #[serde(skip)]
    pub degrees: Vec<usize>,
}

enum Spanning {
    Greedy { uf: UnionFind, edges: Vec<Edge> },
    Sketch(ForestSketch),
}

struct SparsifierPass {
    truncation: TruncationBuilder,
    spanning: Spanning,
    degree: Vec<i64>,
}

impl Consumer for SparsifierPass {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        self.truncation.update(a, b, sign);
        self.degree[a] += sign;
        self.degree[b] += sign;
        match &mut self.spanning {
            Spanning::Greedy { uf, edges } => {
                if uf.union(a, b) {
                    edges.push(Edge::new(a, b));
                }
            }
            Spanning::Sketch(f) => f.update(a, b, sign),
        }
    }

    fn words(&self) -> usize {
        let spanning = match &self.spanning {
            Spanning::Greedy { edges, .. } => 2 * self.degree.len() + 2 * edges.len(),
            Spanning::Sketch(f) => f.words(),
        };
        self.truncation.words() + spanning + self.degree.len()
    }
}

pub fn build_sparsifier(session: &mut StreamSession<'_>, epsilon: f64, seed: u64) -> Result<SparsifierResult> {
    let k = k_for_epsilon(epsilon)?;
    let mut r = build_sparsifier_with_k(session, k, seed)?;
    r.epsilon = epsilon;
    Ok(r)
}

/// The same construction with a forced truncation degree. The leaf
/// guarantee only holds for k >= 186, the structure for any k >= 1.
pub fn build_sparsifier_with_k(session: &mut StreamSession<'_>, k: usize, seed: u64) -> Result<SparsifierResult> {
    if k == 0 {
        return Err(Error::Parameter("truncation degree k must be at least 1".into()));
    }
    let n = session.n();
    crate::cert::reserve(session, crate::cert::truncation_words(session.model(), n, k))?;
    let spanning = match session.model() {
        Model::InsertionOnly => Spanning::Greedy { uf: UnionFind::new(n), edges: Vec::new() },
        Model::Turnstile => Spanning::Sketch(ForestSketch::new(n, crate::rng::derive(seed, "sparsifier-forest", 0))),
    };
    let consumer = SparsifierPass {
        truncation: TruncationBuilder::new(session.model(), n, k, crate::rng::derive(seed, "sparsifier-truncation", 0)),
        spanning,
        degree: vec![0; n],
    };
    let done = run_pass(session, consumer)?;
    let tree_backbone = match done.spanning {
        Spanning::Greedy { mut edges, .. } => {
            edges.sort_unstable();
            edges
        }
        Spanning::Sketch(f) => f.decode()?,
    };
    if tree_backbone.len() + 1 < n {
        return Err(Error::Domain("graph is not connected".into()));
    }
    let truncation = done.truncation.finish()?;
    let mut edges = truncation.edges;
    edges.extend_from_slice(&tree_backbone);
    edges.sort_unstable();
    edges.dedup();
    let degrees = done.degree.iter().map(|&d| d.max(0) as usize).collect();
    Ok(SparsifierResult { epsilon: sparsifier_bound(k), k, edges, tree_backbone, degrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, Generator, GraphStream};

    #[test]
    fn k_schedule() {
        assert_eq!(k_for_epsilon(1.0).unwrap(), 186);
        assert_eq!(k_for_epsilon(0.9).unwrap(), 211);
        assert!(sparsifier_bound(185) > 1.0 && sparsifier_bound(186) <= 1.0);
        assert!(k_for_epsilon(0.0).is_err());
    }

    #[test]
    fn low_degree_graph_is_kept_whole() {
        let s = generate(&Generator::Petersen, 0).unwrap();
        let mut session = StreamSession::new(&s);
        let r = build_sparsifier(&mut session, 0.9, 0).unwrap();
        assert_eq!(session.passes(), 1);
        assert_eq!(r.edges.len(), 15);
        assert_eq!(r.tree_backbone.len(), 9);
    }

    #[test]
    fn forced_k_is_connected_and_small() {
        let s = generate(&Generator::Gnp { n: 30, p: 0.4 }, 3).unwrap();
        let turn = s.with_churn(5, 40).unwrap();
        for stream in [&s, &turn] {
            let r = build_sparsifier_with_k(&mut StreamSession::new(stream), 3, 1).unwrap();
            assert!(r.edges.len() <= 4 * 30);
            let h = crate::graph::AdjacencyGraph::from_edges(30, r.edges.iter().copied()).unwrap();
            assert!(h.is_connected());
        }
    }

    #[test]
    fn disconnected_is_a_domain_error() {
        let s = GraphStream::from_edges(4, [Edge::new(0, 1), Edge::new(2, 3)]).unwrap();
        assert!(matches!(build_sparsifier(&mut StreamSession::new(&s), 1.0, 0), Err(Error::Domain(_))));
    }
}
