//! MaximalPaths: extend node-disjoint input paths to sinks through unused
//! nodes until no further extension is possible.
//!
//! Stage 1 grows every path by a maximal matching between path heads and
//! idle nodes; an unmatched head is retracted and dies. Once fewer than k
//! paths remain active, stage 2 takes them s at a time: a masked s-VC
//! certificate of the idle nodes plus, for each path and idle node, the
//! largest path index adjacent to it, fix the deepest feasible attachment
//! point of each path greedily, and a max-flow supplies disjoint witness
//! routes.

use std::rc::Rc;

use serde::Serialize;

use super::common::{max_neighbor_labels, Labels};
use super::flow::Network;
use super::paths::{MaximalPathsInstance, OutputPath};
use crate::cert::CertBuilder;
use crate::error::{with_retries, Error, Result};
use crate::graph::{Edge, Node};
use crate::harness::{Hub, PartId, StreamSession};
use crate::rng::derive;
use crate::sketch::{maximal_matching_grouped_in, EdgeFilter};

#[derive(Debug, Clone, Serialize)]
pub struct MaximalPathsResult {
    pub paths: Vec<OutputPath>,
    pub stage1_iterations: usize,
    pub batches: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum St {
    Idle,
    Active,
    Dead,
}

struct Live {
    input: usize,
    nodes: Vec<Node>,
    /// leading nodes that still come from the input path
    from_input: usize,
}

struct State<'a> {
    inst: &'a MaximalPathsInstance,
    st: Vec<St>,
    members: Vec<Vec<Node>>,
    out: Vec<OutputPath>,
}

impl State<'_> {
    fn emit(&mut self, input: usize, prefix: usize, nodes: Vec<Node>) {
        for &x in &nodes {
            self.st[x] = St::Dead;
        }
        let g = self.inst.sink_group[*nodes.last().unwrap()].unwrap();
        for &t in &self.members[g] {
            self.st[t] = St::Dead;
        }
        self.out.push(OutputPath { input, prefix, nodes });
    }
}

pub(crate) async fn maximal_paths_in(
    hub: Rc<Hub>,
    part: PartId,
    inst: &MaximalPathsInstance,
    k: usize,
    s: usize,
    seed: u64,
) -> Result<MaximalPathsResult> {
    inst.validate()?;
    let n = inst.n;
    let mut members = vec![Vec::new(); inst.groups()];
    for x in 0..n {
        if let Some(g) = inst.sink_group[x] {
            members[g].push(x);
        }
    }
    let mut state = State { inst, st: vec![St::Idle; n], members, out: Vec::new() };
    for x in 0..n {
        if inst.excluded[x] {
            state.st[x] = St::Dead;
        }
    }
    let mut live: Vec<Live> = Vec::new();
    for (i, p) in inst.paths.iter().enumerate() {
        for &x in p {
            state.st[x] = St::Active;
        }
        live.push(Live { input: i, nodes: p.clone(), from_input: p.len() });
    }
    let groups = Rc::new(inst.sink_group.clone());

    let mut iterations = 0;
    while !live.is_empty() && live.len() >= k {
        iterations += 1;
        let mut head = vec![false; n];
        for p in &live {
            head[*p.nodes.last().unwrap()] = true;
        }
        let idle: Vec<bool> = state.st.iter().map(|&x| x == St::Idle).collect();
        let filter: EdgeFilter = Rc::new(move |a, b| (head[a] && idle[b]) || (head[b] && idle[a]));
        let m = maximal_matching_grouped_in(hub.clone(), part, n, filter, Some(groups.clone()), derive(seed, "stage1", iterations as u64))
            .await?;
        let mate = m.mate(n);
        let mut next = Vec::with_capacity(live.len());
        for mut p in live.drain(..) {
            let h = *p.nodes.last().unwrap();
            match mate[h] {
                Some(v) => {
                    p.nodes.push(v);
                    state.st[v] = St::Active;
                    if inst.sink_group[v].is_some() {
                        state.emit(p.input, p.from_input, p.nodes);
                    } else {
                        next.push(p);
                    }
                }
                None => {
                    p.nodes.pop();
                    state.st[h] = St::Dead;
                    p.from_input = p.from_input.min(p.nodes.len());
                    if !p.nodes.is_empty() {
                        next.push(p);
                    }
                }
            }
        }
        live = next;
    }

    let mut batches = 0;
    for batch in live.chunks(s.max(1)) {
        batches += 1;
        let b = batch.len();
        let mask: Vec<bool> = state.st.iter().map(|&x| x == St::Idle).collect();
        if !mask.iter().any(|&x| x) {
            break;
        }
        let mut labels = vec![None; n];
        for (j, p) in batch.iter().enumerate() {
            for (i, &x) in p.nodes.iter().enumerate() {
                labels[x] = Some((j, i as u64 + 1));
            }
        }
        let labels: Labels = Rc::new(labels);
        let mask = Rc::new(mask);
        let cert_seed = derive(seed, "stage2-cert", batches as u64);
        let cert = hub.pass(part, CertBuilder::new(hub.model(), n, b, cert_seed, Some(mask.clone())));
        let best = max_neighbor_labels(hub.clone(), part, labels, b).await;
        let cert = cert.await.finish()?;
        let attach = |j: usize, v: usize| if mask[v] { best[v * b + j] } else { None };

        let mut chosen: Vec<Option<u64>> = vec![None; b];
        for j in 0..b {
            let mut cands: Vec<u64> = (0..n).filter_map(|v| attach(j, v)).collect();
            cands.sort_unstable_by(|x, y| y.cmp(x));
            cands.dedup();
            for c in cands {
                chosen[j] = Some(c);
                let want = chosen.iter().flatten().count();
                if Flow::build(&state, &mask, &cert.edges, &chosen, &attach).run() == want {
                    break;
                }
                chosen[j] = None;
            }
        }
        let mut flow = Flow::build(&state, &mask, &cert.edges, &chosen, &attach);
        let total = flow.run();
        if total != chosen.iter().flatten().count() {
            return Err(Error::Contract("feasible vector lost its flow".into()));
        }
        for (j, p) in batch.iter().enumerate() {
            let Some(i) = chosen[j] else { continue };
            let i = i as usize;
            let route = flow.route(j);
            let mut nodes = p.nodes[..i].to_vec();
            nodes.extend(route);
            state.emit(p.input, p.from_input.min(i), nodes);
        }
    }
    Ok(MaximalPathsResult { paths: state.out, stage1_iterations: iterations, batches })
}

/// Node-split flow network: s* -> s_j -> attachment nodes -> idle nodes ->
/// sinks -> sink groups -> t*, every node with capacity one.
struct Flow {
    net: Network,
    n: usize,
    b: usize,
    src: usize,
}

impl Flow {
    fn build(
        state: &State,
        mask: &[bool],
        cert: &[Edge],
        chosen: &[Option<u64>],
        attach: &impl Fn(usize, usize) -> Option<u64>,
    ) -> Self {
        let n = state.inst.n;
        let b = chosen.len();
        let groups = state.members.len();
        let src = 2 * n + b + groups;
        let mut net = Network::new(src + 2);
        let group_of = |x: usize| state.inst.sink_group[x];
        for v in 0..n {
            if !mask[v] {
                continue;
            }
            net.add(2 * v, 2 * v + 1, 1);
            if let Some(g) = group_of(v) {
                net.add(2 * v + 1, 2 * n + b + g, 1);
            }
        }
        for e in cert {
            if group_of(e.u).is_none() {
                net.add(2 * e.u + 1, 2 * e.v, 1);
            }
            if group_of(e.v).is_none() {
                net.add(2 * e.v + 1, 2 * e.u, 1);
            }
        }
        for g in 0..groups {
            net.add(2 * n + b + g, src + 1, 1);
        }
        for (j, c) in chosen.iter().enumerate() {
            let Some(c) = *c else { continue };
            net.add(src, 2 * n + j, 1);
            for v in 0..n {
                if attach(j, v) == Some(c) {
                    net.add(2 * n + j, 2 * v, 1);
                }
            }
        }
        Flow { net, n, b, src }
    }

    fn run(&mut self) -> usize {
        self.net.max_flow(self.src, self.src + 1)
    }

    /// The witness route of batch path j, as graph nodes.
    fn route(&mut self, j: usize) -> Vec<Node> {
        let (n, b) = (self.n, self.b);
        let walk = self.net.take_path(2 * n + j, |x| x >= 2 * n + b);
        walk.into_iter().filter(|&x| x < 2 * n && x % 2 == 0).map(|x| x / 2).collect()
    }
}

/// MaximalPaths over the whole stream; instance ids are stream node ids.
pub fn maximal_paths(session: &mut StreamSession<'_>, inst: &MaximalPathsInstance, k: usize, s: usize, seed: u64) -> Result<MaximalPathsResult> {
    if inst.n != session.n() {
        return Err(Error::Parameter("instance size differs from the stream".into()));
    }
    if k == 0 || s == 0 {
        return Err(Error::Parameter("k and s must be positive".into()));
    }
    with_retries(seed, 5, |seed| {
        let inst = Rc::new(inst.clone());
        Hub::run_one(session, move |hub| async move { maximal_paths_in(hub, 0, &inst, k, s, seed).await })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, Generator};
    use crate::oracle::{maximality_check, output_well_formed};

    #[test]
    fn path_reaches_sink() {
        let s = generate(&Generator::Path(6), 0).unwrap();
        let g = s.materialize().unwrap();
        let order = g.bfs(0);
        let far = (0..6).max_by_key(|&x| order[x]).unwrap();
        let inst = MaximalPathsInstance::new(6, vec![vec![0]], &[vec![far]]);
        for k in [1, 2] {
            let r = maximal_paths(&mut StreamSession::new(&s), &inst, k, 1, 0).unwrap();
            assert!(output_well_formed(&g, &inst, &r.paths));
            assert!(maximality_check(&g, &inst, &r.paths));
            assert_eq!(r.paths.len(), 1);
        }
    }

    #[test]
    fn random_instances_are_maximal() {
        for seed in 0..12u64 {
            let s = generate(&Generator::Gnp { n: 40, p: 0.06 }, seed).unwrap();
            let g = s.materialize().unwrap();
            let inst = crate::acceptance::random_paths_instance(&g, seed);
            let streams = if seed % 3 == 0 { vec![s.clone(), s.with_churn(seed, 20).unwrap()] } else { vec![s.clone()] };
            for stream in streams {
                for (k, b) in [(1, 1), (3, 2), (100, 3)] {
                    let r = maximal_paths(&mut StreamSession::new(&stream), &inst, k, b, seed).unwrap();
                    assert!(output_well_formed(&g, &inst, &r.paths), "seed {seed} k {k}");
                    assert!(maximality_check(&g, &inst, &r.paths), "seed {seed} k {k} s {b}");
                }
            }
        }
    }
}
