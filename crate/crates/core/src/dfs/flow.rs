//! Unit-capacity max-flow by BFS augmentation. Flows here are at most the
//! batch size, so a handful of augmentations suffice.

use std::collections::VecDeque;

pub(crate) struct Network {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
    orig: Vec<u32>,
}

impl Network {
    pub fn new(n: usize) -> Self {
        Network { adj: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), orig: Vec::new() }
    }

    pub fn add(&mut self, a: usize, b: usize, c: u32) {
        self.adj[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.orig.push(c);
        self.adj[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
        self.orig.push(0);
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut via = vec![usize::MAX; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for &e in &self.adj[x] {
                let y = self.to[e];
                if self.cap[e] > 0 && !seen[y] {
                    seen[y] = true;
                    via[y] = e;
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut y = t;
        while y != s {
            let e = via[y];
            self.cap[e] -= 1;
            self.cap[e ^ 1] += 1;
            y = self.to[e ^ 1];
        }
        true
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut f = 0;
        while self.augment(s, t) {
            f += 1;
        }
        f
    }

    /// Follows one unit of flow out of `from` until `stop` accepts a node,
    /// consuming the flow it walks along. Returns the visited nodes after
    /// `from`.
    pub fn take_path(&mut self, from: usize, stop: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut walk = Vec::new();
        let mut x = from;
        while !stop(x) {
            let Some(&e) = self.adj[x].iter().find(|&&e| e % 2 == 0 && self.cap[e] < self.orig[e]) else { break };
            self.cap[e] += 1;
            x = self.to[e];
            walk.push(x);
        }
        walk
    }
}
