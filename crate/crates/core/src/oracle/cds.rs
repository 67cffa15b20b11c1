use super::{over, OracleBudget};
use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Node};

type Mask = u128;

fn closed_masks(g: &AdjacencyGraph) -> Vec<Mask> {
    (0..g.n())
        .map(|x| g.neighbors(x).iter().fold(1u128 << x, |m, &y| m | 1u128 << y))
        .collect()
}

fn connected(set: Mask, nbr: &[Mask]) -> bool {
    if set == 0 {
        return true;
    }
    component_of(set, set.trailing_zeros() as usize, nbr) == set
}

/// Members of `set` reachable from `start` inside `set`.
fn component_of(set: Mask, start: usize, nbr: &[Mask]) -> Mask {
    let mut reached: Mask = 1 << start;
    let mut frontier = reached;
    while frontier != 0 {
        let x = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = nbr[x] & set & !reached;
        reached |= fresh;
        frontier |= fresh;
    }
    reached
}

struct Search<'a> {
    closed: &'a [Mask],
    all: Mask,
    max_closed: u32,
    forbidden: Mask,
}

impl Search<'_> {
    fn dominated(&self, chosen: Mask) -> Mask {
        let mut d = 0;
        let mut c = chosen;
        while c != 0 {
            let x = c.trailing_zeros() as usize;
            c &= c - 1;
            d |= self.closed[x];
        }
        d
    }

    fn run(&self, chosen: Mask, budget: u32) -> Option<Mask> {
        let dom = self.dominated(chosen);
        let open = self.all & !dom;
        let size = chosen.count_ones();
        if open == 0 {
            let start = chosen.trailing_zeros() as usize;
            let comp = component_of(chosen, start, self.closed);
            if comp == chosen {
                return Some(chosen);
            }
            if size >= budget {
                return None;
            }
            // some vertex next to this component must join
            let mut frontier = self.dominated(comp) & !chosen & !self.forbidden;
            while frontier != 0 {
                let x = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                if let Some(found) = self.run(chosen | 1 << x, budget) {
                    return Some(found);
                }
            }
            return None;
        }
        if size >= budget || (open.count_ones()).div_ceil(self.max_closed) > budget - size {
            return None;
        }
        // undominated vertex with the fewest options
        let mut best = None;
        let mut o = open;
        while o != 0 {
            let x = o.trailing_zeros() as usize;
            o &= o - 1;
            let opts = (self.closed[x] & !self.forbidden).count_ones();
            if best.is_none_or(|(_, b)| opts < b) {
                best = Some((x, opts));
            }
        }
        let (v, _) = best?;
        let mut opts = self.closed[v] & !self.forbidden;
        while opts != 0 {
            let x = opts.trailing_zeros() as usize;
            opts &= opts - 1;
            if let Some(found) = self.run(chosen | 1 << x, budget) {
                return Some(found);
            }
        }
        None
    }
}

/// A minimum connected dominating set of a connected graph, by iterative
/// deepening over domination branching.
pub fn min_connected_dominating_set(g: &AdjacencyGraph) -> Result<Vec<Node>> {
    let n = g.n();
    over("min connected dominating set nodes", n, OracleBudget::DEFAULT.cds_nodes)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if !g.is_connected() {
        return Err(Error::Domain("connected domination needs a connected graph".into()));
    }
    let closed = closed_masks(g);
    let all: Mask = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    // With n >= 3 a degree-one vertex is never needed and its neighbour always is.
    let mut forced: Mask = 0;
    let mut forbidden: Mask = 0;
    if n >= 3 {
        for x in 0..n {
            if g.degree(x) == 1 {
                forbidden |= 1 << x;
                forced |= 1 << g.neighbors(x)[0];
            }
        }
    }
    let search = Search { closed: &closed, all, max_closed: closed.iter().map(|m| m.count_ones()).max().unwrap_or(1), forbidden };
    let lower = (forced.count_ones()).max(1);
    for budget in lower..=n as u32 {
        if let Some(found) = search.run(forced, budget) {
            return Ok((0..n).filter(|&x| found >> x & 1 == 1).collect());
        }
    }
    Err(Error::Contract("no connected dominating set found".into()))
}

/// leaf(G): the most leaves any spanning tree of G has. Equals n minus the
/// minimum connected dominating set size for n >= 3.
pub fn exact_leaf(g: &AdjacencyGraph) -> Result<usize> {
    match g.n() {
        0 | 1 => Ok(0),
        2 if g.m() == 1 => Ok(2),
        n => Ok(n - min_connected_dominating_set(g)?.len()),
    }
}

/// leaf(G) by listing every spanning tree. Only for tiny graphs.
pub fn leaf_by_tree_enumeration(g: &AdjacencyGraph) -> Result<usize> {
    let n = g.n();
    over("spanning tree enumeration nodes", n, OracleBudget::DEFAULT.tree_enumeration_nodes)?;
    if n <= 1 {
        return Ok(0);
    }
    let edges: Vec<_> = g.edges().collect();
    let mut best = None;
    let mut label: Vec<usize> = (0..n).collect();
    let mut deg = vec![0usize; n];
    fn rec(i: usize, left: usize, edges: &[crate::graph::Edge], label: &mut Vec<usize>, deg: &mut Vec<usize>, best: &mut Option<usize>) {
        if left == 0 {
            let leaves = deg.iter().filter(|&&d| d == 1).count();
            *best = Some(best.map_or(leaves, |b: usize| b.max(leaves)));
            return;
        }
        if edges.len() - i < left {
            return;
        }
        let e = edges[i];
        let (a, b) = (label[e.u], label[e.v]);
        if a != b {
            let saved = label.clone();
            for l in label.iter_mut() {
                if *l == b {
                    *l = a;
                }
            }
            deg[e.u] += 1;
            deg[e.v] += 1;
            rec(i + 1, left - 1, edges, label, deg, best);
            deg[e.u] -= 1;
            deg[e.v] -= 1;
            *label = saved;
        }
        rec(i + 1, left, edges, label, deg, best);
    }
    rec(0, n - 1, &edges, &mut label, &mut deg, &mut best);
    best.ok_or_else(|| Error::Domain("graph has no spanning tree".into()))
}

/// Maximum number of edges between R and V \ R over connected nonempty R.
pub fn connected_max_cut_exact(g: &AdjacencyGraph) -> Result<usize> {
    let n = g.n();
    over("connected max cut nodes", n, OracleBudget::DEFAULT.cut_nodes)?;
    let nbr: Vec<Mask> = (0..n).map(|x| g.neighbors(x).iter().fold(0, |m, &y| m | 1u128 << y)).collect();
    let mut best = 0;
    for set in 1u128..(1u128 << n) {
        if !connected(set, &nbr) {
            continue;
        }
        let mut cut = 0;
        let mut s = set;
        while s != 0 {
            let x = s.trailing_zeros() as usize;
            s &= s - 1;
            cut += (nbr[x] & !set).count_ones() as usize;
        }
        best = best.max(cut);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_graph, Generator};

    #[test]
    fn closed_forms() {
        assert_eq!(exact_leaf(&generate_graph(&Generator::Star(7), 0).unwrap()).unwrap(), 6);
        assert_eq!(exact_leaf(&generate_graph(&Generator::Cycle(9), 0).unwrap()).unwrap(), 2);
        assert_eq!(exact_leaf(&generate_graph(&Generator::Path(2), 0).unwrap()).unwrap(), 2);
        assert_eq!(exact_leaf(&generate_graph(&Generator::Petersen, 0).unwrap()).unwrap(), 6);
    }

    #[test]
    fn cut_closed_forms() {
        assert_eq!(connected_max_cut_exact(&generate_graph(&Generator::Complete(4), 0).unwrap()).unwrap(), 4);
        assert_eq!(connected_max_cut_exact(&generate_graph(&Generator::Cycle(4), 0).unwrap()).unwrap(), 2);
        assert_eq!(connected_max_cut_exact(&generate_graph(&Generator::Path(2), 0).unwrap()).unwrap(), 1);
    }
}
