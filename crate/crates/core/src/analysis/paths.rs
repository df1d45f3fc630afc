use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::{merge_hist, PairWeights, PathStats};
use crate::error::{Error, Result};
use crate::routing::{RouteFailure, RouteOptions, Router};
use crate::topology::{Graph, SwitchId};

const UNREACHED: u32 = u32::MAX;

fn bfs(graph: &Graph, src: SwitchId) -> Vec<u32> {
    let mut dist = vec![UNREACHED; graph.node_count()];
    dist[src.0] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        let du = dist[u.0];
        for &v in graph.neighbors(u) {
            if dist[v.0] == UNREACHED {
                dist[v.0] = du + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

/// Hop distances between all switches; errors on the first unreachable pair.
pub fn distance_matrix(graph: &Graph) -> Result<Vec<Vec<u32>>> {
    let rows: Vec<Vec<u32>> = (0..graph.node_count())
        .into_par_iter()
        .map(|s| bfs(graph, SwitchId(s)))
        .collect();
    for (s, row) in rows.iter().enumerate() {
        if let Some(t) = row.iter().position(|&d| d == UNREACHED) {
            return Err(Error::Disconnected(SwitchId(s), SwitchId(t)));
        }
    }
    Ok(rows)
}

/// Shortest-path statistics over ordered pairs of distinct switches.
pub fn all_pairs_shortest(graph: &Graph, weights: PairWeights<'_>) -> Result<PathStats> {
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::Parameter("need at least two switches".into()));
    }
    let hist = (0..n)
        .into_par_iter()
        .map(|s| {
            let src = SwitchId(s);
            let dist = bfs(graph, src);
            let mut h = BTreeMap::new();
            for (t, &d) in dist.iter().enumerate() {
                if t == s {
                    continue;
                }
                if d == UNREACHED {
                    return Err(Error::Disconnected(src, SwitchId(t)));
                }
                let w = weights.weight(src, SwitchId(t));
                if w > 0 {
                    *h.entry(d as usize + weights.extra_hops()).or_default() += w;
                }
            }
            Ok(h)
        })
        .try_reduce(BTreeMap::new, |a, b| Ok(merge_hist(a, b)))?;
    PathStats::from_histogram(hist).ok_or_else(|| Error::Parameter("no weighted pairs".into()))
}

/// Routing outcome over all ordered pairs of distinct switches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutingStats {
    /// Lengths of delivered paths; `None` if nothing was delivered.
    pub paths: Option<PathStats>,
    pub attempted: u64,
    pub delivered: u64,
    pub local_minimum: u64,
    pub budget_exceeded: u64,
}

impl RoutingStats {
    pub fn success_rate(&self) -> f64 {
        if self.attempted == 0 {
            1.0
        } else {
            self.delivered as f64 / self.attempted as f64
        }
    }

    pub fn mean(&self) -> Option<f64> {
        self.paths.as_ref().map(|p| p.mean)
    }
}

#[derive(Default)]
struct Acc {
    hist: BTreeMap<usize, u64>,
    attempted: u64,
    delivered: u64,
    local_minimum: u64,
    budget_exceeded: u64,
}

impl Acc {
    fn merge(mut self, o: Acc) -> Acc {
        self.hist = merge_hist(self.hist, o.hist);
        self.attempted += o.attempted;
        self.delivered += o.delivered;
        self.local_minimum += o.local_minimum;
        self.budget_exceeded += o.budget_exceeded;
        self
    }
}

/// Routes every ordered pair among `switches` and aggregates path lengths.
pub(crate) fn route_pairs(router: &Router, switches: &[SwitchId], opts: &RouteOptions, weights: PairWeights<'_>) -> Result<RoutingStats> {
    let acc = switches
        .par_iter()
        .map(|&s| {
            let mut acc = Acc::default();
            for &t in switches {
                if s == t {
                    continue;
                }
                let p = router.route(s, t, opts)?;
                acc.attempted += 1;
                match p.failure {
                    None => {
                        acc.delivered += 1;
                        let w = weights.weight(s, t);
                        if w > 0 {
                            *acc.hist.entry(p.hop_count() + weights.extra_hops()).or_default() += w;
                        }
                    }
                    Some(RouteFailure::LocalMinimum) => acc.local_minimum += 1,
                    Some(RouteFailure::HopBudgetExceeded) => acc.budget_exceeded += 1,
                }
            }
            Ok::<_, Error>(acc)
        })
        .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))?;
    Ok(RoutingStats {
        paths: PathStats::from_histogram(acc.hist),
        attempted: acc.attempted,
        delivered: acc.delivered,
        local_minimum: acc.local_minimum,
        budget_exceeded: acc.budget_exceeded,
    })
}

/// Greediest routing statistics over all ordered pairs of distinct switches.
pub fn routing_path_stats(router: &Router, opts: &RouteOptions, weights: PairWeights<'_>) -> Result<RoutingStats> {
    let all: Vec<SwitchId> = (0..router.switch_count()).map(SwitchId).collect();
    route_pairs(router, &all, opts, weights)
}
