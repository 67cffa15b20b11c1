use rand::Rng as _;
use serde::Serialize;

use super::centers::{multi_bfs, BfsConfig};
use crate::error::{Error, Result};
use crate::graph::Node;
use crate::harness::StreamSession;
use crate::rng::{derive, rng};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiameterResult {
    /// The largest distance label seen in any of the searches.
    pub estimate: usize,
    pub sample: Vec<Node>,
    pub far_node: Node,
    pub near_set: Vec<Node>,
    pub passes: usize,
}

/// Three rounds of BFS: from a random sample S1, from the node v* farthest
/// from S1, and from the ceil(sqrt n) nodes closest to v*. Ties go to the
/// lower id. Only running maxima and the current round's labels are used.
pub fn diameter_approx(session: &mut StreamSession<'_>, cfg: &BfsConfig) -> Result<DiameterResult> {
    let n = session.n();
    let start = session.passes();
    if n <= 1 {
        return Ok(DiameterResult { estimate: 0, sample: vec![0], far_node: 0, near_set: vec![0], passes: 0 });
    }
    let nf = n as f64;
    let p = (nf.ln() / nf.sqrt()).min(1.0);
    let mut r = rng(cfg.seed, "diameter-sample");
    let sample: Vec<Node> = (0..n).filter(|_| r.gen_bool(p)).collect();
    if sample.is_empty() {
        return Err(Error::Retryable("the diameter sample came out empty".into()));
    }
    let round = |session: &mut StreamSession<'_>, sources: &[Node], i: u64| {
        let k = cfg.k.max(sources.len()).min(n);
        multi_bfs(session, sources, &BfsConfig { k, seed: derive(cfg.seed, "diameter-round", i), ..*cfg })
    };
    let first = round(session, &sample, 0)?;
    let mut estimate = 0;
    let mut to_sample = vec![usize::MAX; n];
    for row in &first.table.dist {
        for (v, d) in row.iter().enumerate() {
            let d = d.unwrap();
            estimate = estimate.max(d);
            to_sample[v] = to_sample[v].min(d);
        }
    }
    drop(first);
    let far_node = (0..n).max_by_key(|&v| (to_sample[v], std::cmp::Reverse(v))).unwrap();
    let second = round(session, &[far_node], 1)?;
    let from_far: Vec<usize> = second.table.dist[0].iter().map(|d| d.unwrap()).collect();
    estimate = estimate.max(*from_far.iter().max().unwrap());
    let mut order: Vec<Node> = (0..n).collect();
    order.sort_by_key(|&v| (from_far[v], v));
    order.truncate(nf.sqrt().ceil() as usize);
    let third = round(session, &order, 2)?;
    for row in &third.table.dist {
        estimate = estimate.max(row.iter().map(|d| d.unwrap()).max().unwrap());
    }
    Ok(DiameterResult { estimate, sample, far_node, near_set: order, passes: session.passes() - start })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::with_retries;
    use crate::harness::{generate, Generator};

    #[test]
    fn star_and_path() {
        let st = generate(&Generator::Star(30), 0).unwrap();
        let r = with_retries(1, 10, |seed| diameter_approx(&mut StreamSession::new(&st), &BfsConfig::new(10, seed))).unwrap();
        assert_eq!(r.estimate, 2);
        let p = generate(&Generator::Path(40), 0).unwrap();
        let r = with_retries(1, 10, |seed| diameter_approx(&mut StreamSession::new(&p), &BfsConfig::new(10, seed))).unwrap();
        assert!((26..=39).contains(&r.estimate));
    }
}
