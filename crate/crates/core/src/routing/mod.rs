//! Greediest routing.
//!
//! A switch forwards toward the neighbor whose coordinates have the smallest
//! minimum circular distance (MCD) to the destination, and only if that is a
//! strict improvement over its own. With two-hop tables the candidate set
//! also covers switches two hops away; the packet then goes to a neighbor
//! adjacent to the chosen switch.

mod hash;
mod key;
mod multipath;
mod table;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{mcd_prefix, Coordinates};
use crate::topology::{Graph, SwitchId, Topology};

pub use hash::{stable_hash, unit_interval, FiveTuple};
pub use key::{home_switch_in_space, home_switches, key_hash, KeyAddress};
pub use multipath::{multipath_candidates, FirstHopMode, LinkLoads};
pub use table::{RoutingTable, TwoHopEntry};

/// A packet destination: the access switch's coordinates plus a host id.
#[derive(Debug, Clone, PartialEq)]
pub struct DestinationAddress {
    pub coords: Coordinates,
    pub host_id: u64,
}

/// Outcome of one forwarding decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Deliver,
    Forward(SwitchId),
    LocalMinimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RouteFailure {
    LocalMinimum,
    HopBudgetExceeded,
}

/// Switches visited by one routing run, source first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathRecord {
    pub hops: Vec<SwitchId>,
    pub success: bool,
    pub failure: Option<RouteFailure>,
}

impl PathRecord {
    /// Number of links traversed.
    pub fn hop_count(&self) -> usize {
        self.hops.len().saturating_sub(1)
    }

    pub fn destination(&self) -> SwitchId {
        *self.hops.last().expect("path has a source")
    }

    fn ok(hops: Vec<SwitchId>) -> Self {
        Self {
            hops,
            success: true,
            failure: None,
        }
    }

    fn failed(hops: Vec<SwitchId>, why: RouteFailure) -> Self {
        Self {
            hops,
            success: false,
            failure: Some(why),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteOptions {
    /// Use only the first `d` spaces for the metric; `None` means all `L`.
    pub d_spaces: Option<usize>,
    /// 1 = neighbors only, 2 = neighbors and two-hop neighbors.
    pub k_hops: usize,
    /// Maximum links before giving up; `None` means `4·N`.
    pub hop_budget: Option<usize>,
}

impl Default for RouteOptions {
    fn default() -> Self {
        Self {
            d_spaces: None,
            k_hops: 2,
            hop_budget: None,
        }
    }
}

impl RouteOptions {
    pub fn k_hops(k_hops: usize) -> Self {
        Self {
            k_hops,
            ..Self::default()
        }
    }

    pub fn with_d_spaces(mut self, d: usize) -> Self {
        self.d_spaces = Some(d);
        self
    }
}

#[derive(Debug, Clone, Copy)]
enum Candidate {
    Direct(SwitchId),
    TwoHop(usize),
}

/// Best strictly-improving forwarding choice of `table` toward `dest`, if any.
fn select(table: &RoutingTable, own: f64, dest: &Coordinates, d: usize, k_hops: usize) -> Option<(SwitchId, f64)> {
    let mut best: Option<(f64, Candidate)> = None;
    for (n, c) in &table.one_hop {
        let m = mcd_prefix(c, dest, d);
        if best.is_none_or(|(b, _)| m < b) {
            best = Some((m, Candidate::Direct(*n)));
        }
    }
    if k_hops >= 2 {
        for (i, e) in table.two_hop.iter().enumerate() {
            let m = mcd_prefix(&e.coords, dest, d);
            if best.is_none_or(|(b, _)| m < b) {
                best = Some((m, Candidate::TwoHop(i)));
            }
        }
    }
    let (m, cand) = best?;
    if m >= own {
        return None;
    }
    let next = match cand {
        Candidate::Direct(n) => n,
        Candidate::TwoHop(i) => best_via(table, &table.two_hop[i].vias, dest, d),
    };
    Some((next, m))
}

fn best_via(table: &RoutingTable, vias: &[SwitchId], dest: &Coordinates, d: usize) -> SwitchId {
    let mut best = (f64::INFINITY, vias[0]);
    for &v in vias {
        let idx = table
            .one_hop
            .binary_search_by_key(&v, |(n, _)| *n)
            .expect("via is a one-hop neighbor");
        let m = mcd_prefix(&table.one_hop[idx].1, dest, d);
        if m < best.0 {
            best = (m, v);
        }
    }
    best.1
}

/// One greediest forwarding decision at the switch owning `table`.
pub fn greediest_next_hop(
    table: &RoutingTable,
    self_coords: &Coordinates,
    dest: &DestinationAddress,
    d_spaces: usize,
    k_hops: usize,
) -> Decision {
    if *self_coords == dest.coords {
        return Decision::Deliver;
    }
    let own = mcd_prefix(self_coords, &dest.coords, d_spaces);
    match select(table, own, &dest.coords, d_spaces, k_hops) {
        Some((next, _)) => Decision::Forward(next),
        None => Decision::LocalMinimum,
    }
}

#[derive(Debug, Clone, Copy)]
enum Target<'a> {
    Switch(SwitchId),
    /// A coordinate point such as a key address; routing ends at the first
    /// switch that cannot make progress.
    Point(&'a Coordinates),
}

/// Routing state for every switch of one (possibly damaged) network.
#[derive(Debug, Clone)]
pub struct Router {
    coords: Vec<Coordinates>,
    graph: Graph,
    tables: Vec<RoutingTable>,
}

impl Router {
    pub fn new(t: &Topology) -> Self {
        Self::from_graph(t.all_coords(), t.graph())
    }

    /// Routing over an arbitrary adjacency, e.g. a topology with failed links.
    pub fn from_graph(coords: Vec<Coordinates>, graph: Graph) -> Self {
        assert_eq!(coords.len(), graph.node_count(), "one coordinate vector per switch");
        let tables = (0..graph.node_count())
            .into_par_iter()
            .map(|s| RoutingTable::build(&graph, &coords, SwitchId(s), 2).expect("valid switch"))
            .collect();
        Self { coords, graph, tables }
    }

    pub fn switch_count(&self) -> usize {
        self.coords.len()
    }

    pub fn spaces(&self) -> usize {
        self.coords.first().map_or(0, Coordinates::spaces)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn coords(&self, s: SwitchId) -> &Coordinates {
        &self.coords[s.0]
    }

    pub fn table(&self, s: SwitchId) -> &RoutingTable {
        &self.tables[s.0]
    }

    fn check(&self, s: SwitchId) -> Result<()> {
        if s.0 < self.coords.len() {
            Ok(())
        } else {
            Err(Error::UnknownSwitch(s))
        }
    }

    pub(crate) fn resolve(&self, opts: &RouteOptions) -> Result<(usize, usize)> {
        let l = self.spaces();
        let d = opts.d_spaces.unwrap_or(l);
        if d == 0 || d > l {
            return Err(Error::Parameter(format!("d_spaces={d} outside [1, {l}]")));
        }
        if !(1..=2).contains(&opts.k_hops) {
            return Err(Error::Parameter(format!("k_hops must be 1 or 2, got {}", opts.k_hops)));
        }
        let budget = opts.hop_budget.unwrap_or(4 * self.coords.len());
        Ok((d, budget))
    }

    /// Greediest routing from `src` to switch `dst`.
    pub fn route(&self, src: SwitchId, dst: SwitchId, opts: &RouteOptions) -> Result<PathRecord> {
        self.check(src)?;
        self.check(dst)?;
        let (d, budget) = self.resolve(opts)?;
        Ok(self.walk(vec![src], Target::Switch(dst), d, opts.k_hops, budget))
    }

    /// Forwarding choice at `at`, never stepping onto a switch in `visited`.
    ///
    /// If the greedy choice (a neighbor, or the via toward a two-hop switch)
    /// was already visited, the best unvisited neighbor that still strictly
    /// improves on `at` is used instead.
    fn step(&self, at: SwitchId, dest: &Coordinates, d: usize, k_hops: usize, visited: &[bool]) -> Option<SwitchId> {
        let own = mcd_prefix(&self.coords[at.0], dest, d);
        let table = &self.tables[at.0];
        let (next, _) = select(table, own, dest, d, k_hops)?;
        if !visited[next.0] {
            return Some(next);
        }
        let mut best: Option<(f64, SwitchId)> = None;
        for (n, c) in &table.one_hop {
            if visited[n.0] {
                continue;
            }
            let m = mcd_prefix(c, dest, d);
            if m < own && best.is_none_or(|(b, _)| m < b) {
                best = Some((m, *n));
            }
        }
        best.map(|(_, n)| n)
    }

    fn walk(&self, mut path: Vec<SwitchId>, target: Target<'_>, d: usize, k_hops: usize, budget: usize) -> PathRecord {
        let mut visited = vec![false; self.coords.len()];
        for s in &path {
            visited[s.0] = true;
        }
        let dest = match target {
            Target::Switch(dst) => &self.coords[dst.0],
            Target::Point(c) => c,
        };
        loop {
            let cur = *path.last().expect("non-empty path");
            if let Target::Switch(dst) = target {
                if cur == dst {
                    return PathRecord::ok(path);
                }
            }
            if path.len() > budget {
                return PathRecord::failed(path, RouteFailure::HopBudgetExceeded);
            }
            match self.step(cur, dest, d, k_hops, &visited) {
                Some(next) => {
                    visited[next.0] = true;
                    path.push(next);
                }
                None => {
                    return match target {
                        Target::Point(_) => PathRecord::ok(path),
                        Target::Switch(_) => PathRecord::failed(path, RouteFailure::LocalMinimum),
                    };
                }
            }
        }
    }
}
