//! Pass building blocks shared by the DFS algorithms. All node ids are local
//! to the part the pass runs over.

use std::rc::Rc;

use crate::error::Result;
use crate::graph::{Edge, Node, UnionFind};
use crate::harness::{Consumer, Hub, Model, PartId};
use crate::rng::derive;
use crate::sketch::ForestSketch;

/// Spanning forest of the subgraph induced by `mask`.
pub(crate) enum MaskedForest {
    Greedy { mask: Rc<Vec<bool>>, uf: UnionFind, edges: Vec<Edge> },
    Sketch { mask: Rc<Vec<bool>>, sketch: ForestSketch },
}

impl MaskedForest {
    pub fn new(model: Model, mask: Rc<Vec<bool>>, seed: u64) -> Self {
        let n = mask.len();
        match model {
            Model::InsertionOnly => MaskedForest::Greedy { mask, uf: UnionFind::new(n), edges: Vec::new() },
            Model::Turnstile => MaskedForest::Sketch { mask, sketch: ForestSketch::new(n, derive(seed, "masked-forest", 0)) },
        }
    }

    pub fn finish(self) -> Result<Vec<Edge>> {
        match self {
            MaskedForest::Greedy { edges, .. } => Ok(edges),
            MaskedForest::Sketch { sketch, .. } => sketch.decode(),
        }
    }
}

impl Consumer for MaskedForest {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        match self {
            MaskedForest::Greedy { mask, uf, edges } => {
                if mask[a] && mask[b] && uf.union(a, b) {
                    edges.push(Edge::new(a, b));
                }
            }
            MaskedForest::Sketch { mask, sketch } => {
                if mask[a] && mask[b] {
                    sketch.update(a, b, sign);
                }
            }
        }
    }

    fn words(&self) -> usize {
        match self {
            MaskedForest::Greedy { mask, edges, .. } => 2 * mask.len() + 2 * edges.len(),
            MaskedForest::Sketch { sketch, .. } => sketch.words(),
        }
    }
}

/// Component id per node of `mask` (None outside), from forest edges.
pub(crate) fn components(mask: &[bool], forest: &[Edge]) -> Vec<Option<usize>> {
    let n = mask.len();
    let mut uf = UnionFind::new(n);
    for e in forest {
        uf.union(e.u, e.v);
    }
    let mut id = vec![None; n];
    let mut next = 0;
    let mut comp = vec![None; n];
    for x in 0..n {
        if !mask[x] {
            continue;
        }
        let r = uf.find(x);
        if id[r].is_none() {
            id[r] = Some(next);
            next += 1;
        }
        comp[x] = id[r];
    }
    comp
}

/// Every edge of the part.
pub(crate) struct EdgeCollector {
    present: std::collections::BTreeMap<Edge, i64>,
}

impl EdgeCollector {
    pub fn new() -> Self {
        EdgeCollector { present: Default::default() }
    }

    pub fn finish(self) -> Vec<Edge> {
        self.present.into_iter().filter(|&(_, c)| c > 0).map(|(e, _)| e).collect()
    }
}

impl Consumer for EdgeCollector {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        *self.present.entry(Edge::new(a, b)).or_default() += sign;
    }

    fn words(&self) -> usize {
        3 * self.present.len()
    }
}

/// Labelled nodes: `(class, label)`. Labels within a class should be
/// distinct for the maximum to identify a node.
pub(crate) type Labels = Rc<Vec<Option<(usize, u64)>>>;

struct MaxLabel {
    labels: Labels,
    classes: usize,
    best: Vec<Option<u64>>,
}

impl Consumer for MaxLabel {
    fn update(&mut self, a: usize, b: usize, _sign: i64) {
        for (x, y) in [(a, b), (b, a)] {
            if let Some((c, l)) = self.labels[y] {
                let slot = &mut self.best[x * self.classes + c];
                if slot.is_none_or(|v| v < l) {
                    *slot = Some(l);
                }
            }
        }
    }

    fn words(&self) -> usize {
        self.best.len() + self.labels.len()
    }
}

/// Signed count of labelled neighbours whose label is at least the node's
/// current threshold for that class.
struct AtLeast {
    labels: Labels,
    classes: usize,
    threshold: Rc<Vec<u64>>,
    count: Vec<i64>,
}

impl Consumer for AtLeast {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        for (x, y) in [(a, b), (b, a)] {
            if let Some((c, l)) = self.labels[y] {
                let i = x * self.classes + c;
                if l >= self.threshold[i] {
                    self.count[i] += sign;
                }
            }
        }
    }

    fn words(&self) -> usize {
        2 * self.count.len() + self.labels.len()
    }
}

/// For every node x and class c, the largest label of class c among the
/// neighbours of x; indexed `x * classes + c`.
///
/// One pass in insertion-only streams. Turnstile streams cannot track a
/// maximum under deletions, so every (node, class) pair runs its own binary
/// search on signed counters, all in the same passes.
pub(crate) async fn max_neighbor_labels(hub: Rc<Hub>, part: PartId, labels: Labels, classes: usize) -> Vec<Option<u64>> {
    let n = labels.len();
    match hub.model() {
        Model::InsertionOnly => {
            let c = hub.pass(part, MaxLabel { labels, classes, best: vec![None; n * classes] }).await;
            c.best
        }
        Model::Turnstile => {
            let top = labels.iter().flatten().map(|&(_, l)| l).max();
            let Some(top) = top else { return vec![None; n * classes] };
            // invariant: some neighbour has label >= lo, none has label >= hi
            let mut lo = vec![0u64; n * classes];
            let mut hi = vec![top + 1; n * classes];
            let c = hub
                .pass(part, AtLeast { labels: labels.clone(), classes, threshold: Rc::new(lo.clone()), count: vec![0; n * classes] })
                .await;
            let alive: Vec<bool> = c.count.iter().map(|&k| k > 0).collect();
            while (0..n * classes).any(|i| alive[i] && hi[i] - lo[i] > 1) {
                let mid: Vec<u64> = (0..n * classes).map(|i| lo[i] + (hi[i] - lo[i]) / 2).collect();
                let c = hub
                    .pass(part, AtLeast { labels: labels.clone(), classes, threshold: Rc::new(mid.clone()), count: vec![0; n * classes] })
                    .await;
                for i in 0..n * classes {
                    if !alive[i] || hi[i] - lo[i] <= 1 {
                        continue;
                    }
                    if c.count[i] > 0 {
                        lo[i] = mid[i];
                    } else {
                        hi[i] = mid[i];
                    }
                }
            }
            (0..n * classes).map(|i| alive[i].then_some(lo[i])).collect()
        }
    }
}

/// Depth-first search of an in-memory edge list from `root`, smallest
/// neighbour first. Nodes not reached keep `None` depth.
pub(crate) fn dfs_edges(n: usize, edges: &[Edge], root: Node) -> (Vec<Option<Node>>, Vec<Option<usize>>) {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let mut parent = vec![None; n];
    let mut depth = vec![None; n];
    depth[root] = Some(0);
    let mut stack = vec![(root, 0usize)];
    while let Some(&mut (x, ref mut i)) = stack.last_mut() {
        if let Some(&y) = adj[x].get(*i) {
            *i += 1;
            if depth[y].is_none() {
                depth[y] = Some(depth[x].unwrap() + 1);
                parent[y] = Some(x);
                stack.push((y, 0));
            }
        } else {
            stack.pop();
        }
    }
    (parent, depth)
}
