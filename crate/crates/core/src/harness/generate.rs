//! Fixture generators. All of them are deterministic in the seed and emit
//! insertion-only streams of connected simple graphs.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::stream::GraphStream;
use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Edge, UnionFind};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// G(n, p), augmented with bridging edges until connected.
    Gnp { n: usize, p: f64 },
    RandomRegular { n: usize, d: usize },
    Path(usize),
    Star(usize),
    Cycle(usize),
    Complete(usize),
    Petersen,
    LayeredBlocks { n: usize, t: usize },
    /// (k+1) copies of the Index gadget sharing one hub. `bits` is the n*n
    /// bipartite adjacency, row major; `query` = (i, j), 0-based.
    IndexHard { n: usize, k: usize, bits: Vec<bool>, query: (usize, usize) },
}

pub fn generate(kind: &Generator, seed: u64) -> Result<GraphStream> {
    let mut r = rng::rng(seed, "generate");
    let (n, mut edges) = match kind {
        &Generator::Gnp { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("gnp probability {p} outside [0, 1]")));
            }
            (n, gnp_connected(n, p, &mut r))
        }
        &Generator::RandomRegular { n, d } => (n, random_regular(n, d, &mut r)?),
        &Generator::Path(n) => (n, (1..n).map(|i| Edge::new(i - 1, i)).collect()),
        &Generator::Star(n) => (n, (1..n).map(|i| Edge::new(0, i)).collect()),
        &Generator::Cycle(n) => {
            if n < 3 {
                return Err(Error::Parameter(format!("cycle needs n >= 3, got {n}")));
            }
            (n, (0..n).map(|i| Edge::new(i, (i + 1) % n)).collect())
        }
        &Generator::Complete(n) => {
            (n, (0..n).flat_map(|u| (u + 1..n).map(move |v| Edge::new(u, v))).collect())
        }
        Generator::Petersen => (10, petersen()),
        &Generator::LayeredBlocks { n, t } => (n, layered_blocks(n, t)?),
        Generator::IndexHard { n, k, bits, query } => index_hard(*n, *k, bits, *query)?,
    };
    if n == 0 {
        return Err(Error::Parameter("graphs need at least one node".into()));
    }
    if matches!(kind, Generator::Gnp { .. } | Generator::RandomRegular { .. }) {
        edges.shuffle(&mut r);
    }
    GraphStream::from_edges(n, edges)
}

/// Convenience for tests and oracles: generate and materialize.
pub fn generate_graph(kind: &Generator, seed: u64) -> Result<AdjacencyGraph> {
    generate(kind, seed)?.materialize()
}

fn gnp_connected(n: usize, p: f64, r: &mut Rng) -> Vec<Edge> {
    let mut edges = Vec::new();
    let mut uf = UnionFind::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push(Edge::new(u, v));
                uf.union(u, v);
            }
        }
    }
    // Bridge components with one random edge each, in order of their smallest node.
    let mut reps: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for x in 0..n {
        let root = uf.find(x);
        if index[root] == usize::MAX {
            index[root] = reps.len();
            reps.push(Vec::new());
        }
        reps[index[root]].push(x);
    }
    for w in reps.windows(2) {
        let a = *w[0].choose(r).unwrap();
        let b = *w[1].choose(r).unwrap();
        edges.push(Edge::new(a, b));
    }
    edges
}

fn random_regular(n: usize, d: usize, r: &mut Rng) -> Result<Vec<Edge>> {
    if (n * d) % 2 == 1 {
        return Err(Error::Parameter(format!("n*d = {} is odd", n * d)));
    }
    if d >= n {
        return Err(Error::Parameter(format!("degree {d} needs more than {n} nodes")));
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    if d == 0 || (d == 1 && n > 2) {
        return Err(Error::Parameter(format!("a connected {d}-regular graph on {n} nodes does not exist")));
    }
    // Configuration model with restarts; accept the first simple connected pairing.
    for _ in 0..10_000 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|x| std::iter::repeat_n(x, d)).collect();
        stubs.shuffle(r);
        let mut edges: Vec<Edge> = stubs.chunks(2).map(|c| Edge::new(c[0], c[1])).collect();
        if edges.iter().any(|e| e.u == e.v) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let g = AdjacencyGraph::from_edges(n, edges.iter().copied())?;
        if g.is_connected() {
            return Ok(edges);
        }
    }
    Err(Error::Parameter(format!("no simple connected {d}-regular graph found on {n} nodes")))
}

fn petersen() -> Vec<Edge> {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push(Edge::new(i, (i + 1) % 5));
        e.push(Edge::new(i, i + 5));
        e.push(Edge::new(5 + i, 5 + (i + 2) % 5));
    }
    e
}

/// Layer sizes 1, t, t, ..., with the last layer holding the remainder.
/// Nodes in the same or adjacent layers are all connected.
pub fn layer_sizes(n: usize, t: usize) -> Vec<usize> {
    let mut sizes = vec![1];
    let mut left = n.saturating_sub(1);
    while left > 0 {
        let take = left.min(t);
        sizes.push(take);
        left -= take;
    }
    sizes
}

fn layered_blocks(n: usize, t: usize) -> Result<Vec<Edge>> {
    if t == 0 {
        return Err(Error::Parameter("layered_blocks needs t >= 1".into()));
    }
    let sizes = layer_sizes(n, t);
    let mut start = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in &sizes {
        start.push(acc);
        acc += s;
    }
    let layer = |i: usize| start[i]..start[i] + sizes[i];
    let mut edges = Vec::new();
    for i in 0..sizes.len() {
        for x in layer(i) {
            for y in layer(i) {
                if x < y {
                    edges.push(Edge::new(x, y));
                }
            }
            if i + 1 < sizes.len() {
                for y in layer(i + 1) {
                    edges.push(Edge::new(x, y));
                }
            }
        }
    }
    Ok(edges)
}

/// Node ids of the Index gadget: the hub `s` is 0, copy `c` occupies the
/// block `1 + c*(2n+2) ..`, laid out as x_1..x_n, y_1..y_n, l, t.
pub struct IndexLayout {
    pub n: usize,
    pub copies: usize,
}

impl IndexLayout {
    pub fn hub(&self) -> usize {
        0
    }
    fn base(&self, c: usize) -> usize {
        1 + c * (2 * self.n + 2)
    }
    pub fn x(&self, c: usize, i: usize) -> usize {
        self.base(c) + i
    }
    pub fn y(&self, c: usize, j: usize) -> usize {
        self.base(c) + self.n + j
    }
    pub fn l(&self, c: usize) -> usize {
        self.base(c) + 2 * self.n
    }
    pub fn t(&self, c: usize) -> usize {
        self.base(c) + 2 * self.n + 1
    }
    pub fn node_count(&self) -> usize {
        1 + self.copies * (2 * self.n + 2)
    }
}

fn index_hard(n: usize, k: usize, bits: &[bool], (qi, qj): (usize, usize)) -> Result<(usize, Vec<Edge>)> {
    if n == 0 || bits.len() != n * n || qi >= n || qj >= n {
        return Err(Error::Parameter(format!(
            "index_hard needs n >= 1, n*n bits and a query inside the grid (n = {n}, bits = {})",
            bits.len()
        )));
    }
    let lay = IndexLayout { n, copies: k + 1 };
    let s = lay.hub();
    let mut edges = Vec::new();
    for c in 0..=k {
        for i in 0..n {
            for j in 0..n {
                if bits[i * n + j] {
                    edges.push(Edge::new(lay.x(c, i), lay.y(c, j)));
                }
            }
        }
        for i in 0..n {
            edges.push(Edge::new(s, lay.x(c, i)));
        }
        for j in 0..n {
            if j != qj {
                edges.push(Edge::new(s, lay.y(c, j)));
            }
        }
        edges.push(Edge::new(lay.l(c), lay.x(c, qi)));
        edges.push(Edge::new(s, lay.t(c)));
        edges.push(Edge::new(lay.t(c), lay.y(c, qj)));
    }
    Ok((lay.node_count(), edges))
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Gnp { n, p } => write!(f, "gnp:{n},{p}"),
            Generator::RandomRegular { n, d } => write!(f, "regular:{n},{d}"),
            Generator::Path(n) => write!(f, "path:{n}"),
            Generator::Star(n) => write!(f, "star:{n}"),
            Generator::Cycle(n) => write!(f, "cycle:{n}"),
            Generator::Complete(n) => write!(f, "complete:{n}"),
            Generator::Petersen => write!(f, "petersen"),
            Generator::LayeredBlocks { n, t } => write!(f, "layered:{n},{t}"),
            Generator::IndexHard { n, k, bits, query } => {
                let ones: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                write!(f, "index_hard:{n},{k},{},{},{ones}", query.0, query.1)
            }
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    /// Parses `kind:arg,arg,...`, e.g. `gnp:500,0.02`, `layered:1000,25`,
    /// `index_hard:3,1,0,2,101001110`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("cannot parse generator '{s}'"));
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let args: Vec<&str> = if args.is_empty() { Vec::new() } else { args.split(',').collect() };
        let int = |i: usize| -> Result<usize> { args.get(i).ok_or_else(bad)?.trim().parse().map_err(|_| bad()) };
        let want = |k: usize| if args.len() == k { Ok(()) } else { Err(bad()) };
        Ok(match kind {
            "gnp" => {
                want(2)?;
                let p = args[1].trim().parse().map_err(|_| bad())?;
                Generator::Gnp { n: int(0)?, p }
            }
            "regular" => {
                want(2)?;
                Generator::RandomRegular { n: int(0)?, d: int(1)? }
            }
            "path" => {
                want(1)?;
                Generator::Path(int(0)?)
            }
            "star" => {
                want(1)?;
                Generator::Star(int(0)?)
            }
            "cycle" => {
                want(1)?;
                Generator::Cycle(int(0)?)
            }
            "complete" => {
                want(1)?;
                Generator::Complete(int(0)?)
            }
            "petersen" => {
                want(0)?;
                Generator::Petersen
            }
            "layered" => {
                want(2)?;
                Generator::LayeredBlocks { n: int(0)?, t: int(1)? }
            }
            "index_hard" => {
                want(5)?;
                let bits: Vec<bool> = args[4]
                    .trim()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(bad()),
                    })
                    .collect::<Result<_>>()?;
                Generator::IndexHard { n: int(0)?, k: int(1)?, bits, query: (int(2)?, int(3)?) }
            }
            _ => return Err(bad()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_connected_and_deterministic() {
        let kinds = [
            Generator::Gnp { n: 40, p: 0.05 },
            Generator::RandomRegular { n: 12, d: 4 },
            Generator::Path(5),
            Generator::Star(6),
            Generator::Cycle(7),
            Generator::Petersen,
            Generator::LayeredBlocks { n: 30, t: 4 },
        ];
        for kind in &kinds {
            let a = generate(kind, 9).unwrap();
            assert_eq!(a, generate(kind, 9).unwrap());
            assert!(a.materialize().unwrap().is_connected(), "{kind}");
        }
    }

    #[test]
    fn regular_parity_is_a_parameter_error() {
        assert!(matches!(generate(&Generator::RandomRegular { n: 5, d: 3 }, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["gnp:500,0.02", "layered:1000,25", "petersen", "index_hard:2,1,0,1,1001"] {
            let g: Generator = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("gnp:5".parse::<Generator>().is_err());
        assert!("".parse::<Generator>().is_err());
    }

    #[test]
    fn layered_shape() {
        assert_eq!(layer_sizes(10, 4), vec![1, 4, 4, 1]);
        let g = generate_graph(&Generator::LayeredBlocks { n: 10, t: 4 }, 0).unwrap();
        assert_eq!(g.degree(0), 4);
        assert_eq!(g.degree(9), 4);
    }
}
