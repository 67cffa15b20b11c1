use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Node};

/// Residual network with integer capacities and BFS augmentation.
struct Network {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl Network {
    fn new(n: usize) -> Self {
        Network { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    fn arc(&mut self, a: usize, b: usize, c: i64) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        loop {
            let mut via = vec![usize::MAX; self.head.len()];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            while let Some(x) = queue.pop_front() {
                for &id in &self.head[x] {
                    let y = self.to[id];
                    if self.cap[id] > 0 && !seen[y] {
                        seen[y] = true;
                        via[y] = id;
                        queue.push_back(y);
                    }
                }
            }
            if !seen[t] {
                return flow;
            }
            let mut x = t;
            while x != s {
                let id = via[x];
                self.cap[id] -= 1;
                self.cap[id ^ 1] += 1;
                x = self.to[id ^ 1];
            }
            flow += 1;
        }
    }
}

fn check_pair(g: &AdjacencyGraph, u: Node, v: Node) -> Result<()> {
    if u == v || u >= g.n() || v >= g.n() {
        return Err(Error::Parameter(format!("connectivity needs two distinct nodes, got {u} and {v}")));
    }
    Ok(())
}

/// Maximum number of internally node-disjoint u-v paths (a direct edge
/// counts as one path).
pub fn node_connectivity(g: &AdjacencyGraph, u: Node, v: Node) -> Result<usize> {
    check_pair(g, u, v)?;
    let n = g.n();
    let big = n as i64 + 1;
    let mut net = Network::new(2 * n);
    for x in 0..n {
        net.arc(2 * x, 2 * x + 1, if x == u || x == v { big } else { 1 });
    }
    for e in g.edges() {
        net.arc(2 * e.u + 1, 2 * e.v, 1);
        net.arc(2 * e.v + 1, 2 * e.u, 1);
    }
    Ok(net.max_flow(2 * u + 1, 2 * v) as usize)
}

/// Maximum number of edge-disjoint u-v paths.
pub fn edge_connectivity(g: &AdjacencyGraph, u: Node, v: Node) -> Result<usize> {
    check_pair(g, u, v)?;
    let mut net = Network::new(g.n());
    for e in g.edges() {
        net.arc(e.u, e.v, 1);
        net.arc(e.v, e.u, 1);
    }
    Ok(net.max_flow(u, v) as usize)
}

/// Node connectivity by Menger: the smallest vertex set separating u from
/// v, plus one for a direct edge. Exponential; n <= 16.
pub fn node_connectivity_brute(g: &AdjacencyGraph, u: Node, v: Node) -> Result<usize> {
    check_pair(g, u, v)?;
    super::over("brute-force connectivity nodes", g.n(), 16)?;
    let direct = usize::from(g.has_edge(u, v));
    let others: Vec<Node> = (0..g.n()).filter(|&x| x != u && x != v).collect();
    let separated = |cut: u32| {
        let removed = |x: Node| others.iter().position(|&o| o == x).is_some_and(|i| cut >> i & 1 == 1);
        let mut seen = vec![false; g.n()];
        seen[u] = true;
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if (x == u && y == v) || seen[y] || removed(y) {
                    continue;
                }
                if y == v {
                    return false;
                }
                seen[y] = true;
                stack.push(y);
            }
        }
        true
    };
    for size in 0..=others.len() {
        let found = (0u32..1 << others.len()).filter(|m| m.count_ones() as usize == size).any(separated);
        if found {
            return Ok(size + direct);
        }
    }
    Ok(others.len() + direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_graph, Generator};

    #[test]
    fn closed_forms() {
        let k4 = generate_graph(&Generator::Complete(4), 0).unwrap();
        assert_eq!(node_connectivity(&k4, 0, 3).unwrap(), 3);
        assert_eq!(node_connectivity_brute(&k4, 0, 3).unwrap(), 3);
        assert_eq!(edge_connectivity(&k4, 1, 2).unwrap(), 3);
        let p = generate_graph(&Generator::Path(5), 0).unwrap();
        assert_eq!(node_connectivity(&p, 0, 4).unwrap(), 1);
        assert_eq!(node_connectivity_brute(&p, 0, 4).unwrap(), 1);
    }
}
