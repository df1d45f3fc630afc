//! Single-commodity max-flow by blocking flows (Dinic).

use std::collections::VecDeque;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
}

/// Directed network with real capacities. Arcs are stored in pairs so that
/// arc `i ^ 1` is the residual partner of arc `i`.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    pub source: usize,
    pub sink: usize,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        assert!(source < nodes && sink < nodes && source != sink);
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            source,
            sink,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds arc `u → v`.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: f64) {
        assert!(cap.is_finite() && cap >= 0.0, "capacity must be finite and non-negative");
        self.adj[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, cap });
        self.adj[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, cap: 0.0 });
    }

    /// Adds an undirected link as two opposing arcs of capacity `cap`.
    pub fn add_link(&mut self, u: usize, v: usize, cap: f64) {
        self.add_arc(u, v, cap);
        self.add_arc(v, u, cap);
    }

    fn levels(&self, residual: &[f64]) -> Option<Vec<u32>> {
        let mut level = vec![u32::MAX; self.adj.len()];
        level[self.source] = 0;
        let mut q = VecDeque::from([self.source]);
        while let Some(u) = q.pop_front() {
            for &a in &self.adj[u] {
                let v = self.arcs[a].to;
                if residual[a] > EPS && level[v] == u32::MAX {
                    level[v] = level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        (level[self.sink] != u32::MAX).then_some(level)
    }

    fn push(&self, u: usize, limit: f64, level: &[u32], next: &mut [usize], residual: &mut [f64]) -> f64 {
        if u == self.sink {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let a = self.adj[u][next[u]];
            let v = self.arcs[a].to;
            if residual[a] > EPS && level[v] == level[u] + 1 {
                let got = self.push(v, limit.min(residual[a]), level, next, residual);
                if got > EPS {
                    residual[a] -= got;
                    residual[a ^ 1] += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0.0
    }

    /// Value of a maximum source-sink flow.
    pub fn max_flow(&self) -> f64 {
        let mut residual: Vec<f64> = self.arcs.iter().map(|a| a.cap).collect();
        let mut total = 0.0;
        while let Some(level) = self.levels(&residual) {
            let mut next = vec![0; self.adj.len()];
            loop {
                let f = self.push(self.source, f64::INFINITY, &level, &mut next, &mut residual);
                if f <= EPS {
                    break;
                }
                total += f;
            }
        }
        total
    }
}
