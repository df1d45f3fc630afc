use rand::seq::index::sample;
use serde::Serialize;

use super::paths::route_pairs;
use super::PairWeights;
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::routing::{RouteOptions, Router};
use crate::topology::{SwitchId, Topology};

/// Routing under random failures, pooled over trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureReport {
    pub fraction_failed: f64,
    pub trials: usize,
    pub attempted: u64,
    pub delivered: u64,
    pub local_minimum: u64,
    pub budget_exceeded: u64,
    pub success_rate: f64,
    /// Mean hop count of delivered paths; NaN if none were delivered.
    pub mean_success_path_length: f64,
}

#[derive(Default)]
struct Pool {
    attempted: u64,
    delivered: u64,
    local_minimum: u64,
    budget_exceeded: u64,
    hops: f64,
}

impl Pool {
    fn report(self, fraction_failed: f64, trials: usize) -> FailureReport {
        FailureReport {
            fraction_failed,
            trials,
            attempted: self.attempted,
            delivered: self.delivered,
            local_minimum: self.local_minimum,
            budget_exceeded: self.budget_exceeded,
            success_rate: if self.attempted == 0 {
                1.0
            } else {
                self.delivered as f64 / self.attempted as f64
            },
            mean_success_path_length: if self.delivered == 0 {
                f64::NAN
            } else {
                self.hops / self.delivered as f64
            },
        }
    }

    fn add(&mut self, router: &Router, switches: &[SwitchId], opts: &RouteOptions) -> Result<()> {
        let st = route_pairs(router, switches, opts, PairWeights::Switch)?;
        self.attempted += st.attempted;
        self.delivered += st.delivered;
        self.local_minimum += st.local_minimum;
        self.budget_exceeded += st.budget_exceeded;
        if let Some(p) = st.paths {
            self.hops += p.mean * p.count() as f64;
        }
        Ok(())
    }
}

fn check_fraction(f: f64) -> Result<()> {
    if (0.0..=1.0).contains(&f) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("failure fraction {f} outside [0, 1]")))
    }
}

/// Removes `⌊f·|E|⌋` random links per trial, rebuilds the routing tables on
/// what survives and routes every ordered pair with two-hop tables.
pub fn failure_experiment(t: &Topology, f: f64, trials: usize, hop_budget: Option<usize>, rng: &mut Rng) -> Result<FailureReport> {
    check_fraction(f)?;
    let graph = t.graph();
    let edges = graph.edges();
    let remove = (f * edges.len() as f64).floor() as usize;
    let all: Vec<SwitchId> = (0..t.switch_count()).map(SwitchId).collect();
    let opts = RouteOptions {
        hop_budget,
        ..RouteOptions::k_hops(2)
    };
    let mut pool = Pool::default();
    for _ in 0..trials {
        let failed: Vec<_> = sample(rng, edges.len(), remove).into_iter().map(|i| edges[i]).collect();
        let router = Router::from_graph(t.all_coords(), graph.without_edges(&failed));
        pool.add(&router, &all, &opts)?;
    }
    Ok(pool.report(f, trials))
}

/// Fails `⌊f·N⌋` random switches per trial by removing all their links, then
/// routes every ordered pair of surviving switches.
pub fn switch_failure_experiment(t: &Topology, f: f64, trials: usize, hop_budget: Option<usize>, rng: &mut Rng) -> Result<FailureReport> {
    check_fraction(f)?;
    let graph = t.graph();
    let n = t.switch_count();
    let remove = (f * n as f64).floor() as usize;
    let opts = RouteOptions {
        hop_budget,
        ..RouteOptions::k_hops(2)
    };
    let mut pool = Pool::default();
    for _ in 0..trials {
        let mut down = vec![false; n];
        for i in sample(rng, n, remove) {
            down[i] = true;
        }
        let failed: Vec<_> = graph.edges().into_iter().filter(|(a, b)| down[a.0] || down[b.0]).collect();
        let router = Router::from_graph(t.all_coords(), graph.without_edges(&failed));
        let alive: Vec<_> = (0..n).filter(|&i| !down[i]).map(SwitchId).collect();
        pool.add(&router, &alive, &opts)?;
    }
    Ok(pool.report(f, trials))
}
