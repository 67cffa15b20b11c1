//! Spanning-forest sketch.
//!
//! Node x keeps, for every Borůvka round, an ℓ0 sketch of its signed
//! incidence vector: edge {u, v} with u < v is item u*n + v, counted +1 at u
//! and -1 at v. Summing the vectors of a node set cancels its internal
//! edges, so a query on the sum samples an edge leaving the set.

use std::sync::Arc;

use super::l0::{ceil_log2, Cell, L0Params, L0Query, Reader};
use crate::error::{Error, Result};
use crate::graph::{Edge, Node, UnionFind};
use crate::harness::Consumer;
use crate::rng::derive;

/// Repetitions per round sketch. Borůvka tolerates a few failed queries per
/// round, so this is lower than a standalone sampler needs.
pub const FOREST_REPS: usize = 6;

#[derive(Debug, Clone)]
pub struct ForestSketch {
    n: usize,
    seed: u64,
    rounds: Vec<Arc<L0Params>>,
    /// node-major: cells[(x * rounds + r) * block ..]
    cells: Vec<Cell>,
    block: usize,
    scratch: Vec<(usize, u64)>,
}

pub fn boruvka_rounds(n: usize) -> usize {
    ceil_log2(n.max(2) as u64) + 2
}

impl ForestSketch {
    pub fn new(n: usize, seed: u64) -> Self {
        let universe = (n * n).max(2) as u64;
        let rounds: Vec<_> = (0..boruvka_rounds(n))
            .map(|r| L0Params::new(universe, derive(seed, "forest-round", r as u64), FOREST_REPS))
            .collect();
        let block = rounds[0].cells();
        let cells = vec![Cell::default(); n * rounds.len() * block];
        ForestSketch { n, seed, rounds, cells, block, scratch: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.cells.len() * 4
    }

    pub fn update(&mut self, a: Node, b: Node, sign: i64) {
        debug_assert!(a != b && a < self.n && b < self.n);
        let e = Edge::new(a, b);
        let item = e.index(self.n);
        let nr = self.rounds.len();
        for r in 0..nr {
            let params = &self.rounds[r];
            params.footprint(item, &mut self.scratch);
            let at_u = (e.u * nr + r) * self.block;
            params.apply_footprint(&mut self.cells[at_u..at_u + self.block], item, sign, &self.scratch);
            let at_v = (e.v * nr + r) * self.block;
            params.apply_footprint(&mut self.cells[at_v..at_v + self.block], item, -sign, &self.scratch);
        }
    }

    /// Removes edges already known to be present, by linearity.
    pub fn peel(&mut self, edges: &[Edge]) {
        for e in edges {
            self.update(e.u, e.v, -1);
        }
    }

    /// Borůvka over merged node sketches, one round sketch per round.
    /// Fails retryably if some component never confirms it has no
    /// outgoing edge.
    pub fn decode(&self) -> Result<Vec<Edge>> {
        let n = self.n;
        let nr = self.rounds.len();
        let mut uf = UnionFind::new(n);
        let mut done = vec![false; n];
        let mut forest = Vec::new();
        let mut sum = vec![Cell::default(); self.block];
        for r in 0..nr {
            let mut members: Vec<Vec<Node>> = vec![Vec::new(); n];
            for x in 0..n {
                members[uf.find(x)].push(x);
            }
            let mut found = Vec::new();
            for (root, nodes) in members.iter().enumerate() {
                if nodes.is_empty() || done[root] {
                    continue;
                }
                sum.iter_mut().for_each(|c| *c = Cell::default());
                for &x in nodes {
                    let at = (x * nr + r) * self.block;
                    for (s, c) in sum.iter_mut().zip(&self.cells[at..at + self.block]) {
                        s.merge(c);
                    }
                }
                match self.rounds[r].query_cells(&sum) {
                    L0Query::Empty => done[root] = true,
                    L0Query::Index(item) if item / (n as u64) < item % (n as u64) => found.push(Edge::from_index(item, n)),
                    L0Query::Index(_) => {}
                    L0Query::Fail => {}
                }
            }
            for e in found {
                if uf.union(e.u, e.v) {
                    forest.push(e);
                }
            }
            // an Empty component has no outgoing edge, so it never merges again
            if (0..n).all(|x| done[uf.find(x)]) {
                forest.sort();
                return Ok(forest);
            }
        }
        Err(Error::Retryable(format!("forest sketch exhausted after {nr} rounds")))
    }

    /// Versioned little-endian blob: "FSK1", n, seed, rounds, then cells.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + self.cells.len() * 32);
        out.extend_from_slice(b"FSK1");
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.rounds.len() as u32).to_le_bytes());
        super::l0::write_cells(&mut out, &self.cells);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut rd = Reader::new(bytes);
        rd.magic(b"FSK1")?;
        let n = rd.u64()? as usize;
        let seed = rd.u64()?;
        let rounds = rd.u32()? as usize;
        if n > 1 << 20 || rounds != boruvka_rounds(n) {
            return Err(Error::MalformedStream("forest sketch blob has a bad shape".into()));
        }
        let mut fs = ForestSketch::new(n, seed);
        fs.cells = rd.cells(fs.cells.len())?;
        rd.finish()?;
        Ok(fs)
    }
}

impl Consumer for ForestSketch {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        ForestSketch::update(self, a, b, sign);
    }

    fn words(&self) -> usize {
        ForestSketch::words(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_decodes_to_itself() {
        let mut fs = ForestSketch::new(4, 1);
        for (a, b) in [(0, 1), (1, 2), (2, 3)] {
            fs.update(a, b, 1);
        }
        assert_eq!(fs.decode().unwrap(), vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3)]);
    }

    #[test]
    fn cycle_with_deletion() {
        let mut fs = ForestSketch::new(4, 2);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            fs.update(a, b, 1);
        }
        fs.update(0, 3, -1);
        assert_eq!(fs.decode().unwrap().len(), 3);
        let back = ForestSketch::from_bytes(&fs.to_bytes()).unwrap();
        assert_eq!(back.decode().unwrap(), fs.decode().unwrap());
    }

    #[test]
    fn empty_graph_is_empty_forest() {
        let fs = ForestSketch::new(5, 3);
        assert!(fs.decode().unwrap().is_empty());
    }
}
