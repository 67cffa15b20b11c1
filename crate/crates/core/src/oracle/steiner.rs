use super::paths::exact_distances;
use super::{over, OracleBudget};
use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Node};

fn distinct_terminals(g: &AdjacencyGraph, terminals: &[Node]) -> Result<Vec<Node>> {
    let mut t = terminals.to_vec();
    t.sort_unstable();
    t.dedup();
    if t.iter().any(|&x| x >= g.n()) {
        return Err(Error::Parameter("terminal out of range".into()));
    }
    Ok(t)
}

/// Minimum Steiner tree size in edges, by the Dreyfus-Wagner recurrence.
pub fn steiner_opt(g: &AdjacencyGraph, terminals: &[Node]) -> Result<usize> {
    let t = distinct_terminals(g, terminals)?;
    over("Steiner terminals", t.len(), OracleBudget::DEFAULT.steiner_terminals)?;
    if t.len() <= 1 {
        return Ok(0);
    }
    let n = g.n();
    let inf = usize::MAX / 4;
    let all: Vec<Vec<usize>> = exact_distances(g, &(0..n).collect::<Vec<_>>())
        .into_iter()
        .map(|row| row.into_iter().map(|d| d.unwrap_or(inf)).collect())
        .collect();
    if t.iter().any(|&x| all[t[0]][x] >= inf) {
        return Err(Error::Domain("terminals are not connected".into()));
    }
    let k = t.len();
    let full = (1usize << k) - 1;
    let mut dp = vec![vec![inf; n]; 1 << k];
    for (i, &ti) in t.iter().enumerate() {
        dp[1 << i] = all[ti].clone();
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let mut merged = vec![inf; n];
        // split off submasks containing the lowest terminal
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let a = sub | low;
            if a != mask {
                let b = mask ^ a;
                for v in 0..n {
                    merged[v] = merged[v].min(dp[a][v] + dp[b][v]);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        for v in 0..n {
            dp[mask][v] = (0..n).map(|u| merged[u] + all[u][v]).min().unwrap_or(inf);
        }
    }
    Ok(*dp[full].iter().min().unwrap())
}

/// Minimum Steiner tree size as the smallest connected node set containing
/// the terminals, minus one. Exponential in n.
pub fn steiner_exhaustive(g: &AdjacencyGraph, terminals: &[Node]) -> Result<usize> {
    let t = distinct_terminals(g, terminals)?;
    let n = g.n();
    over("exhaustive Steiner nodes", n, 20)?;
    if t.len() <= 1 {
        return Ok(0);
    }
    let must: u32 = t.iter().fold(0, |m, &x| m | 1 << x);
    let mut best = None;
    for set in 0u32..1 << n {
        if set & must != must || best.is_some_and(|b| set.count_ones() as usize >= b) {
            continue;
        }
        let start = t[0];
        let mut reached = 1u32 << start;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if set >> y & 1 == 1 && reached >> y & 1 == 0 {
                    reached |= 1 << y;
                    stack.push(y);
                }
            }
        }
        if reached == set {
            best = Some(set.count_ones() as usize);
        }
    }
    best.map(|b| b - 1).ok_or_else(|| Error::Domain("terminals are not connected".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_graph, Generator};

    #[test]
    fn closed_forms() {
        let c = generate_graph(&Generator::Cycle(8), 0).unwrap();
        assert_eq!(steiner_opt(&c, &[0, 3]).unwrap(), 3);
        assert_eq!(steiner_opt(&c, &[0, 2, 4, 6]).unwrap(), 6);
        assert_eq!(steiner_exhaustive(&c, &[0, 2, 4, 6]).unwrap(), 6);
        let all: Vec<_> = (0..8).collect();
        assert_eq!(steiner_opt(&c, &all).unwrap(), 7);
    }
}
