//! Measurement harness over topologies and routers.

mod failure;
mod load;
mod paths;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::Coordinates;
use crate::routing::RoutingTable;
use crate::topology::{Graph, SwitchId};

pub use failure::{failure_experiment, switch_failure_experiment, FailureReport};
pub use load::{control_area_report, link_load, ControlAreaReport, LinkLoadReport, LinkLoadRow};
pub use paths::{all_pairs_shortest, distance_matrix, routing_path_stats, RoutingStats};

/// Length distribution over a multiset of paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStats {
    pub mean: f64,
    pub p10: usize,
    pub p90: usize,
    pub histogram: BTreeMap<usize, u64>,
}

impl PathStats {
    /// `None` when the histogram holds no paths.
    pub fn from_histogram(histogram: BTreeMap<usize, u64>) -> Option<Self> {
        let count: u64 = histogram.values().sum();
        if count == 0 {
            return None;
        }
        let total: f64 = histogram.iter().map(|(&l, &c)| l as f64 * c as f64).sum();
        Some(Self {
            mean: total / count as f64,
            p10: nearest_rank(&histogram, count, 10),
            p90: nearest_rank(&histogram, count, 90),
            histogram,
        })
    }

    pub fn count(&self) -> u64 {
        self.histogram.values().sum()
    }
}

fn nearest_rank(hist: &BTreeMap<usize, u64>, count: u64, pct: u64) -> usize {
    let rank = (pct * count).div_ceil(100).max(1);
    let mut seen = 0;
    for (&l, &c) in hist {
        seen += c;
        if seen >= rank {
            return l;
        }
    }
    unreachable!("rank within count")
}

pub(crate) fn merge_hist(mut a: BTreeMap<usize, u64>, b: BTreeMap<usize, u64>) -> BTreeMap<usize, u64> {
    for (l, c) in b {
        *a.entry(l).or_default() += c;
    }
    a
}

/// How ordered switch pairs enter path statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairWeights<'a> {
    /// Every ordered pair of distinct switches once, length in switch hops.
    Switch,
    /// Every ordered pair of servers on distinct switches; the length adds
    /// the two server links to the switch hops.
    Server(&'a [usize]),
}

impl PairWeights<'_> {
    pub(crate) fn weight(&self, a: SwitchId, b: SwitchId) -> u64 {
        match self {
            PairWeights::Switch => 1,
            PairWeights::Server(s) => (s[a.0] * s[b.0]) as u64,
        }
    }

    pub(crate) fn extra_hops(&self) -> usize {
        match self {
            PairWeights::Switch => 0,
            PairWeights::Server(_) => 2,
        }
    }
}

/// Pearson correlation; NaN when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    if x.is_empty() {
        return f64::NAN;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

/// Coordinate entries stored per switch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardingState {
    pub k_hops: usize,
    pub per_switch: Vec<usize>,
    pub mean: f64,
    pub max: usize,
}

pub fn forwarding_state(graph: &Graph, coords: &[Coordinates], k_hops: usize) -> crate::Result<ForwardingState> {
    let per_switch = (0..graph.node_count())
        .into_par_iter()
        .map(|s| RoutingTable::build(graph, coords, SwitchId(s), k_hops).map(|t| t.entry_count()))
        .collect::<crate::Result<Vec<_>>>()?;
    let max = per_switch.iter().copied().max().unwrap_or(0);
    let mean = if per_switch.is_empty() {
        0.0
    } else {
        per_switch.iter().sum::<usize>() as f64 / per_switch.len() as f64
    };
    Ok(ForwardingState {
        k_hops,
        per_switch,
        mean,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_percentiles() {
        let h: BTreeMap<usize, u64> = [(1, 1), (2, 8), (3, 1)].into();
        let s = PathStats::from_histogram(h).unwrap();
        assert_eq!((s.p10, s.p90), (1, 2));
        assert!((s.mean - 2.0).abs() < 1e-12);
        let h: BTreeMap<usize, u64> = [(1, 2), (2, 9)].into();
        let s = PathStats::from_histogram(h).unwrap();
        // ranks ceil(1.1) = 2 and ceil(9.9) = 10
        assert_eq!((s.p10, s.p90), (1, 2));
        assert!(PathStats::from_histogram(BTreeMap::new()).is_none());
    }

    #[test]
    fn pearson_values() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-12);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_nan());
    }

    #[test]
    fn forwarding_state_nine_switch_b() {
        let r = crate::routing::tests::nine_switch_rings_only();
        let coords: Vec<_> = (0..9).map(|i| r.coords(SwitchId(i)).clone()).collect();
        let st = forwarding_state(r.graph(), &coords, 2).unwrap();
        assert_eq!(st.per_switch[1], 8);
        let st1 = forwarding_state(r.graph(), &coords, 1).unwrap();
        assert_eq!(st1.per_switch[1], 4);
        for (s, &e) in st.per_switch.iter().enumerate() {
            let d = r.graph().degree(SwitchId(s));
            assert!(e <= d + d * d);
        }
    }
}
