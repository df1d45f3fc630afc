//! Multi-path first hops.
//!
//! The source may send a flow through any neighbor that is strictly closer to
//! the destination than itself. After the first hop the packet follows
//! ordinary greediest routing.

use std::collections::HashMap;

use super::{FiveTuple, PathRecord, RouteOptions, Router, RoutingTable, Target};
use crate::error::Result;
use crate::geometry::{mcd_prefix, Coordinates};
use crate::topology::SwitchId;

/// How the source picks among the candidate first hops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstHopMode {
    /// 5-tuple hash modulo the number of candidates.
    #[default]
    Hash,
    /// Candidate whose outgoing link carries the least traffic so far,
    /// ties broken by the 5-tuple hash.
    LoadAware,
}

/// Cumulative traffic per directed link.
#[derive(Debug, Clone, Default)]
pub struct LinkLoads {
    counters: HashMap<(SwitchId, SwitchId), u64>,
}

impl LinkLoads {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, from: SwitchId, to: SwitchId) -> u64 {
        self.counters.get(&(from, to)).copied().unwrap_or(0)
    }

    pub fn add(&mut self, from: SwitchId, to: SwitchId, amount: u64) {
        *self.counters.entry((from, to)).or_default() += amount;
    }

    /// Charges `amount` to every link of `path`.
    pub fn record(&mut self, path: &[SwitchId], amount: u64) {
        for w in path.windows(2) {
            self.add(w[0], w[1], amount);
        }
    }
}

/// Neighbors strictly closer to `dest` than the owner, sorted by id.
pub fn multipath_candidates(table: &RoutingTable, self_coords: &Coordinates, dest: &Coordinates, d_spaces: usize) -> Vec<SwitchId> {
    let own = mcd_prefix(self_coords, dest, d_spaces);
    table
        .one_hop
        .iter()
        .filter(|(_, c)| mcd_prefix(c, dest, d_spaces) < own)
        .map(|(n, _)| *n)
        .collect()
}

impl Router {
    /// Routes one flow, choosing the first hop among all closer neighbors.
    ///
    /// `loads` is consulted only in [`FirstHopMode::LoadAware`]; it is not
    /// updated here.
    pub fn multipath_route(
        &self,
        src: SwitchId,
        dst: SwitchId,
        flow: &FiveTuple,
        mode: FirstHopMode,
        loads: Option<&LinkLoads>,
        opts: &RouteOptions,
    ) -> Result<PathRecord> {
        self.check(src)?;
        self.check(dst)?;
        let (d, budget) = self.resolve(opts)?;
        if src == dst {
            return Ok(PathRecord::ok(vec![src]));
        }
        let cands = multipath_candidates(self.table(src), self.coords(src), self.coords(dst), d);
        if cands.is_empty() {
            return Ok(self.walk(vec![src], Target::Switch(dst), d, opts.k_hops, budget));
        }
        let h = flow.hash();
        let first = match (mode, loads) {
            (FirstHopMode::LoadAware, Some(loads)) => {
                let least = cands.iter().map(|&v| loads.get(src, v)).min().expect("non-empty");
                let tied: Vec<_> = cands.into_iter().filter(|&v| loads.get(src, v) == least).collect();
                tied[(h % tied.len() as u64) as usize]
            }
            _ => cands[(h % cands.len() as u64) as usize],
        };
        Ok(self.walk(vec![src, first], Target::Switch(dst), d, opts.k_hops, budget))
    }
}
