use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Node};

/// Node-disjoint directed paths.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PathSystem {
    pub paths: Vec<Vec<Node>>,
}

impl PathSystem {
    pub fn new(paths: Vec<Vec<Node>>) -> Self {
        PathSystem { paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        self.paths.iter().flatten().copied()
    }

    /// Path index per node, for nodes on some path.
    pub fn owner(&self, n: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; n];
        for (i, p) in self.paths.iter().enumerate() {
            for &x in p {
                owner[x] = Some(i);
            }
        }
        owner
    }

    pub fn validate(&self, g: &AdjacencyGraph) -> Result<()> {
        let mut seen = vec![false; g.n()];
        for p in &self.paths {
            if p.is_empty() {
                return Err(Error::Contract("empty path in a path system".into()));
            }
            for (i, &x) in p.iter().enumerate() {
                if x >= g.n() || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Contract(format!("node {x} repeated or out of range")));
                }
                if i > 0 && !g.has_edge(p[i - 1], x) {
                    return Err(Error::Contract(format!("path step {}-{x} is not an edge", p[i - 1])));
                }
            }
        }
        Ok(())
    }
}

/// Input of MaximalPaths. Node ids are local to the instance.
///
/// Sinks come in groups: a group stands for one contracted sink path, so at
/// most one output path may end in each group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalPathsInstance {
    pub n: usize,
    /// Input paths; the first node of each is its source.
    pub paths: Vec<Vec<Node>>,
    pub sink_group: Vec<Option<usize>>,
    /// Nodes that take no part at all.
    pub excluded: Vec<bool>,
}

impl MaximalPathsInstance {
    pub fn new(n: usize, paths: Vec<Vec<Node>>, sinks: &[Vec<Node>]) -> Self {
        let mut sink_group = vec![None; n];
        for (g, group) in sinks.iter().enumerate() {
            for &t in group {
                sink_group[t] = Some(g);
            }
        }
        MaximalPathsInstance { n, paths, sink_group, excluded: vec![false; n] }
    }

    pub fn groups(&self) -> usize {
        self.sink_group.iter().flatten().map(|g| g + 1).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let mut on_path = vec![false; self.n];
        for p in &self.paths {
            if p.is_empty() {
                return Err(Error::Parameter("an input path is empty".into()));
            }
            for &x in p {
                if x >= self.n || std::mem::replace(&mut on_path[x], true) {
                    return Err(Error::Parameter(format!("input paths overlap at node {x}")));
                }
                if self.sink_group[x].is_some() || self.excluded[x] {
                    return Err(Error::Parameter(format!("input path node {x} is a sink or excluded")));
                }
            }
        }
        Ok(())
    }
}

/// One MaximalPaths output path: the first `prefix` nodes of input path
/// `input`, then new nodes, ending at a sink.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputPath {
    pub input: usize,
    pub prefix: usize,
    pub nodes: Vec<Node>,
}
