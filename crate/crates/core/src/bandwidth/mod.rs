//! Capacity metrics: max-flow, bisection bandwidth, permutation traffic and
//! max-min fair throughput. Every link and server NIC has unit capacity.

mod flow;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::routing::{FirstHopMode, FiveTuple, LinkLoads, PathRecord, RouteOptions, Router};
use crate::topology::{SwitchId, Topology};

pub use flow::FlowNetwork;

/// Maximum flow values of random balanced server bipartitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BisectionReport {
    pub per_partition: Vec<f64>,
    pub min: f64,
}

/// Max-flow from the servers of side A to those of side B.
pub fn partition_flow(t: &Topology, server_switch: &[SwitchId], side_a: &[bool]) -> f64 {
    let n = t.switch_count();
    let (src, sink) = (n, n + 1);
    let mut a = vec![0usize; n];
    let mut b = vec![0usize; n];
    for (sw, &in_a) in server_switch.iter().zip(side_a) {
        if in_a {
            a[sw.0] += 1;
        } else {
            b[sw.0] += 1;
        }
    }
    let mut net = FlowNetwork::new(n + 2, src, sink);
    for s in 0..n {
        if a[s] > 0 {
            net.add_arc(src, s, a[s] as f64);
        }
        if b[s] > 0 {
            net.add_arc(s, sink, b[s] as f64);
        }
    }
    for e in t.edges() {
        net.add_link(e.a.0, e.b.0, 1.0);
    }
    net.max_flow()
}

/// Minimum max-flow over `partitions` random balanced splits of the servers.
pub fn bisection_bandwidth(t: &Topology, partitions: usize, rng: &mut Rng) -> Result<BisectionReport> {
    let servers = t.server_switches();
    if servers.len() < 2 {
        return Err(Error::Parameter("bisection needs at least two servers".into()));
    }
    if partitions == 0 {
        return Err(Error::Parameter("at least one partition required".into()));
    }
    let half = servers.len() / 2;
    let splits: Vec<Vec<bool>> = (0..partitions)
        .map(|_| {
            let mut ids: Vec<usize> = (0..servers.len()).collect();
            ids.shuffle(rng);
            let mut side = vec![false; servers.len()];
            for &i in &ids[..half] {
                side[i] = true;
            }
            side
        })
        .collect();
    let per_partition: Vec<f64> = splits.par_iter().map(|s| partition_flow(t, &servers, s)).collect();
    let min = per_partition.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(BisectionReport { per_partition, min })
}

/// One flow between two servers, identified by global server index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flow {
    pub src: usize,
    pub dst: usize,
    pub demand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficMatrix {
    pub flows: Vec<Flow>,
}

/// Uniform random derangement: server `i` sends one unit flow to `π(i) ≠ i`.
pub fn permutation_traffic(servers: usize, rng: &mut Rng) -> Result<TrafficMatrix> {
    if servers < 2 {
        return Err(Error::Parameter("permutation traffic needs at least two servers".into()));
    }
    let mut perm: Vec<usize> = (0..servers).collect();
    loop {
        perm.shuffle(rng);
        if perm.iter().enumerate().all(|(i, &p)| i != p) {
            break;
        }
    }
    Ok(TrafficMatrix {
        flows: perm
            .into_iter()
            .enumerate()
            .map(|(src, dst)| Flow { src, dst, demand: 1.0 })
            .collect(),
    })
}

/// Routes each flow as `k` subflows with distinct source ports.
pub fn route_subflows(
    router: &Router,
    server_switch: &[SwitchId],
    matrix: &TrafficMatrix,
    k: usize,
    mode: FirstHopMode,
    opts: &RouteOptions,
) -> Result<Vec<Vec<PathRecord>>> {
    let tuple = |f: &Flow, j: usize| FiveTuple::tcp(f.src as u32, f.dst as u32, 10_000 + j as u16, 80);
    let ends = |f: &Flow| (server_switch[f.src], server_switch[f.dst]);
    match mode {
        FirstHopMode::Hash => matrix
            .flows
            .par_iter()
            .map(|f| {
                let (s, d) = ends(f);
                (0..k)
                    .map(|j| router.multipath_route(s, d, &tuple(f, j), mode, None, opts))
                    .collect()
            })
            .collect(),
        FirstHopMode::LoadAware => {
            let mut loads = LinkLoads::new();
            let mut out = Vec::with_capacity(matrix.flows.len());
            for f in &matrix.flows {
                let (s, d) = ends(f);
                let mut subs = Vec::with_capacity(k);
                for j in 0..k {
                    let p = router.multipath_route(s, d, &tuple(f, j), mode, Some(&loads), opts)?;
                    loads.record(&p.hops, 1);
                    subs.push(p);
                }
                out.push(subs);
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputReport {
    /// Indices into the traffic matrix of the flows that were allocated.
    pub flows: Vec<usize>,
    /// Rate of each allocated flow, parallel to `flows`.
    pub per_flow_rate: Vec<f64>,
    /// Rates of the delivered subflows of each allocated flow, in route order.
    pub subflow_rates: Vec<Vec<f64>>,
    /// Flows without a single delivered subflow.
    pub excluded: Vec<usize>,
    pub total: f64,
    pub jain_index: f64,
}

/// Jain's fairness index; NaN for an empty or all-zero allocation.
pub fn jain_index(rates: &[f64]) -> f64 {
    let sum: f64 = rates.iter().sum();
    let sq: f64 = rates.iter().map(|r| r * r).sum();
    if sq == 0.0 {
        return f64::NAN;
    }
    sum * sum / (rates.len() as f64 * sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Resource {
    Uplink(usize),
    Downlink(usize),
    Link(SwitchId, SwitchId),
}

const SATURATED: f64 = 1e-9;

/// Max-min fair rates by progressive filling.
///
/// Subflows of flow `i` follow `routes[i]`; each is capped at `demand / k`
/// and crosses the sender's NIC, the directed links of its path and the
/// receiver's NIC.
pub fn maxmin_throughput(t: &Topology, matrix: &TrafficMatrix, routes: &[Vec<PathRecord>]) -> Result<ThroughputReport> {
    if routes.len() != matrix.flows.len() {
        return Err(Error::Parameter(format!(
            "{} route lists for {} flows",
            routes.len(),
            matrix.flows.len()
        )));
    }
    let server_switch = t.server_switches();
    let mut index: HashMap<Resource, usize> = HashMap::new();
    let mut capacity: Vec<f64> = Vec::new();
    let mut intern = |r: Resource| {
        *index.entry(r).or_insert_with(|| {
            capacity.push(1.0);
            capacity.len() - 1
        })
    };

    struct Sub {
        flow: usize,
        cap: f64,
        uses: Vec<usize>,
    }
    let mut subs = Vec::new();
    let mut flows = Vec::new();
    let mut excluded = Vec::new();
    for (i, (f, paths)) in matrix.flows.iter().zip(routes).enumerate() {
        if f.src >= server_switch.len() || f.dst >= server_switch.len() {
            return Err(Error::Parameter(format!("flow {i} names an unknown server")));
        }
        let ok: Vec<_> = paths
            .iter()
            .filter(|p| p.success && p.hops.first() == Some(&server_switch[f.src]) && p.hops.last() == Some(&server_switch[f.dst]))
            .collect();
        if ok.is_empty() {
            excluded.push(i);
            continue;
        }
        let slot = flows.len();
        flows.push(i);
        for p in ok {
            let mut uses = vec![intern(Resource::Uplink(f.src)), intern(Resource::Downlink(f.dst))];
            uses.extend(p.hops.windows(2).map(|w| intern(Resource::Link(w[0], w[1]))));
            subs.push(Sub {
                flow: slot,
                cap: f.demand / paths.len() as f64,
                uses,
            });
        }
    }

    let mut remaining = capacity;
    let mut active = vec![0usize; remaining.len()];
    for s in &subs {
        for &r in &s.uses {
            active[r] += 1;
        }
    }
    let mut rate = vec![0.0; subs.len()];
    let mut frozen = vec![false; subs.len()];
    let mut live = subs.len();
    while live > 0 {
        let mut inc = f64::INFINITY;
        for (r, &a) in active.iter().enumerate() {
            if a > 0 {
                inc = inc.min(remaining[r] / a as f64);
            }
        }
        for (i, s) in subs.iter().enumerate() {
            if !frozen[i] {
                inc = inc.min(s.cap - rate[i]);
            }
        }
        let inc = inc.max(0.0);
        for (r, &a) in active.iter().enumerate() {
            remaining[r] -= inc * a as f64;
        }
        for (i, s) in subs.iter().enumerate() {
            if frozen[i] {
                continue;
            }
            rate[i] += inc;
            let saturated = s.cap - rate[i] <= SATURATED || s.uses.iter().any(|&r| remaining[r] <= SATURATED);
            if saturated {
                frozen[i] = true;
                live -= 1;
                for &r in &s.uses {
                    active[r] -= 1;
                }
            }
        }
    }

    let mut subflow_rates = vec![Vec::new(); flows.len()];
    for (s, r) in subs.iter().zip(&rate) {
        subflow_rates[s.flow].push(*r);
    }
    let per_flow_rate: Vec<f64> = subflow_rates.iter().map(|v| v.iter().sum()).collect();
    Ok(ThroughputReport {
        total: per_flow_rate.iter().sum(),
        jain_index: jain_index(&per_flow_rate),
        flows,
        per_flow_rate,
        subflow_rates,
        excluded,
    })
}
