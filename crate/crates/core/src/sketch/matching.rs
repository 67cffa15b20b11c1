//! Maximal matching over a candidate edge set.
//!
//! Insertion-only streams use the one-pass greedy rule. Turnstile streams
//! emulate Israeli-Itai rounds: in each pass every free node samples one
//! candidate edge to another free node, and proposals are resolved greedily
//! in node order. A round in which every sampler reports Empty proves
//! maximality.

use std::rc::Rc;
use std::sync::Arc;

use super::l0::{ceil_log2, default_reps, L0Params, L0Query, L0Sketch};
use crate::error::{Error, Result};
use crate::graph::{Edge, Node};
use crate::harness::{Consumer, Hub, Model, PartId, StreamSession};
use crate::rng::derive;

/// Candidate predicate on local node ids. It is only ever asked about
/// endpoints of a stream edge and must be symmetric.
pub type EdgeFilter = Rc<dyn Fn(usize, usize) -> bool>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pub edges: Vec<Edge>,
}

impl Matching {
    pub fn mate(&self, n: usize) -> Vec<Option<Node>> {
        let mut mate = vec![None; n];
        for e in &self.edges {
            mate[e.u] = Some(e.v);
            mate[e.v] = Some(e.u);
        }
        mate
    }
}

/// Optional grouping: nodes sharing a group act as one node, so at most one
/// of them is matched.
pub type NodeGroups = Option<Rc<Vec<Option<usize>>>>;

struct Slots {
    groups: NodeGroups,
    mate: Vec<Option<usize>>,
    taken: Vec<bool>,
}

impl Slots {
    fn new(n: usize, groups: NodeGroups) -> Self {
        let g = groups.as_ref().map_or(0, |g| g.iter().flatten().map(|x| x + 1).max().unwrap_or(0));
        Slots { groups, mate: vec![None; n], taken: vec![false; g] }
    }

    fn group(&self, x: usize) -> Option<usize> {
        self.groups.as_ref().and_then(|g| g[x])
    }

    fn free(&self, x: usize) -> bool {
        self.mate[x].is_none() && self.group(x).is_none_or(|g| !self.taken[g])
    }

    fn join(&mut self, a: usize, b: usize) {
        self.mate[a] = Some(b);
        self.mate[b] = Some(a);
        for x in [a, b] {
            if let Some(g) = self.group(x) {
                self.taken[g] = true;
            }
        }
    }
}

struct Greedy {
    filter: EdgeFilter,
    slots: Slots,
    edges: Vec<Edge>,
}

impl Consumer for Greedy {
    fn update(&mut self, a: usize, b: usize, _sign: i64) {
        if self.slots.free(a) && self.slots.free(b) && (self.filter)(a, b) {
            self.slots.join(a, b);
            self.edges.push(Edge::new(a, b));
        }
    }

    fn words(&self) -> usize {
        self.slots.mate.len() + self.slots.taken.len() + 2 * self.edges.len()
    }
}

struct Proposals {
    filter: EdgeFilter,
    free: Rc<Vec<bool>>,
    params: Arc<L0Params>,
    samplers: Vec<Option<L0Sketch>>,
}

impl Proposals {
    fn touch(&mut self, x: usize, y: usize, sign: i64) {
        let params = &self.params;
        self.samplers[x].get_or_insert_with(|| L0Sketch::new(params.clone())).update(y as u64, sign);
    }
}

impl Consumer for Proposals {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        if self.free[a] && self.free[b] && (self.filter)(a, b) {
            self.touch(a, b, sign);
            self.touch(b, a, sign);
        }
    }

    fn words(&self) -> usize {
        self.samplers.iter().flatten().map(L0Sketch::words).sum::<usize>() + self.free.len()
    }
}

pub fn matching_round_cap(n: usize) -> usize {
    4 * ceil_log2(n.max(2) as u64) + 4
}

/// Maximal matching of the candidate edges inside `part` (local ids
/// `0..n_local`).
pub async fn maximal_matching_in(hub: Rc<Hub>, part: PartId, n_local: usize, filter: EdgeFilter, seed: u64) -> Result<Matching> {
    maximal_matching_grouped_in(hub, part, n_local, filter, None, seed).await
}

/// As [`maximal_matching_in`], with each group of nodes matched at most once.
pub async fn maximal_matching_grouped_in(
    hub: Rc<Hub>,
    part: PartId,
    n_local: usize,
    filter: EdgeFilter,
    groups: NodeGroups,
    seed: u64,
) -> Result<Matching> {
    match hub.model() {
        Model::InsertionOnly => {
            let g = hub.pass(part, Greedy { filter, slots: Slots::new(n_local, groups), edges: Vec::new() }).await;
            let mut edges = g.edges;
            edges.sort();
            Ok(Matching { edges })
        }
        Model::Turnstile => {
            let mut slots = Slots::new(n_local, groups);
            let mut edges = Vec::new();
            let reps = default_reps(n_local);
            for round in 0..matching_round_cap(n_local) {
                let free = Rc::new((0..n_local).map(|x| slots.free(x)).collect::<Vec<_>>());
                let params = L0Params::new(n_local.max(2) as u64, derive(seed, "matching-round", round as u64), reps);
                let props = Proposals { filter: filter.clone(), free, params, samplers: vec![None; n_local] };
                let props = hub.pass(part, props).await;
                let mut quiet = true;
                for x in 0..n_local {
                    let Some(sk) = &props.samplers[x] else { continue };
                    match sk.query() {
                        L0Query::Empty => {}
                        L0Query::Fail => quiet = false,
                        L0Query::Index(y) => {
                            quiet = false;
                            let y = y as usize;
                            if y < n_local && y != x && slots.free(x) && slots.free(y) {
                                slots.join(x, y);
                                edges.push(Edge::new(x, y));
                            }
                        }
                    }
                }
                if quiet {
                    edges.sort();
                    return Ok(Matching { edges });
                }
            }
            Err(Error::Retryable("maximal matching did not settle within the round cap".into()))
        }
    }
}

/// Maximal matching of the whole stream restricted to candidate edges.
pub fn maximal_matching(session: &mut StreamSession<'_>, filter: impl Fn(Node, Node) -> bool + 'static, seed: u64) -> Result<Matching> {
    let n = session.n();
    let filter: EdgeFilter = Rc::new(filter);
    Hub::run_one(session, move |hub| maximal_matching_in(hub, 0, n, filter, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::GraphStream;

    #[test]
    fn p3_and_disjoint_edges() {
        let s = GraphStream::from_edges(3, [Edge::new(0, 1), Edge::new(1, 2)]).unwrap();
        let m = maximal_matching(&mut StreamSession::new(&s), |_, _| true, 0).unwrap();
        assert_eq!(m.edges.len(), 1);
        let s = GraphStream::from_edges(6, [Edge::new(0, 1), Edge::new(2, 3), Edge::new(4, 5)]).unwrap();
        for stream in [s.clone(), s.with_churn(3, 4).unwrap()] {
            let m = maximal_matching(&mut StreamSession::new(&stream), |_, _| true, 1).unwrap();
            assert_eq!(m.edges.len(), 3);
        }
    }
}
