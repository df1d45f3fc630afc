use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::pearson;
use crate::error::Result;
use crate::geometry::{circular_distance, control_area_size, mcd};
use crate::routing::{RouteOptions, Router};
use crate::topology::{SwitchId, Topology};

/// Paths crossing one undirected link.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkLoadRow {
    pub a: SwitchId,
    pub b: SwitchId,
    pub path_count: u64,
    pub endpoint_mcd: f64,
    pub endpoint_cd_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkLoadReport {
    /// One row per link, ordered by `(a, b)`.
    pub rows: Vec<LinkLoadRow>,
    /// Paths that visit each switch, endpoints included.
    pub switch_counts: Vec<u64>,
}

impl LinkLoadReport {
    pub fn max_path_count(&self) -> u64 {
        self.rows.iter().map(|r| r.path_count).max().unwrap_or(0)
    }

    /// Rows from most to least loaded, ties by link id.
    pub fn ranked(&self) -> Vec<&LinkLoadRow> {
        let mut v: Vec<_> = self.rows.iter().enumerate().collect();
        v.sort_by_key(|(i, r)| (std::cmp::Reverse(r.path_count), *i));
        v.into_iter().map(|(_, r)| r).collect()
    }

    /// Mean endpoint MCD of the most loaded 10% and of the least loaded 10%
    /// of links. `None` with fewer than ten links.
    pub fn decile_endpoint_mcd(&self) -> Option<(f64, f64)> {
        let k = self.rows.len() / 10;
        if k == 0 {
            return None;
        }
        let mut asc: Vec<_> = self.rows.iter().enumerate().collect();
        asc.sort_by_key(|(i, r)| (r.path_count, *i));
        let mean = |rows: &[(usize, &LinkLoadRow)]| rows.iter().map(|(_, r)| r.endpoint_mcd).sum::<f64>() / rows.len() as f64;
        let ranked = self.ranked();
        let top = ranked[..k].iter().map(|r| r.endpoint_mcd).sum::<f64>() / k as f64;
        Some((top, mean(&asc[..k])))
    }
}

/// Routes every ordered pair of distinct switches and counts, per link and
/// per switch, the delivered paths through it.
pub fn link_load(t: &Topology, router: &Router, opts: &RouteOptions) -> Result<LinkLoadReport> {
    let edges = router.graph().edges();
    let index: HashMap<(SwitchId, SwitchId), usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let n = router.switch_count();
    let (link, sw) = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut link = vec![0u64; edges.len()];
            let mut sw = vec![0u64; n];
            for d in 0..n {
                if s == d {
                    continue;
                }
                let p = router.route(SwitchId(s), SwitchId(d), opts)?;
                if !p.success {
                    continue;
                }
                for w in p.hops.windows(2) {
                    let key = if w[0] < w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
                    link[index[&key]] += 1;
                }
                for h in &p.hops {
                    sw[h.0] += 1;
                }
            }
            Ok::<_, crate::Error>((link, sw))
        })
        .try_reduce(
            || (vec![0; edges.len()], vec![0; n]),
            |(mut la, mut sa), (lb, sb)| {
                la.iter_mut().zip(lb).for_each(|(x, y)| *x += y);
                sa.iter_mut().zip(sb).for_each(|(x, y)| *x += y);
                Ok((la, sa))
            },
        )?;
    let rows = edges
        .iter()
        .zip(link)
        .map(|(&(a, b), path_count)| {
            let (ca, cb) = (t.coords(a), t.coords(b));
            LinkLoadRow {
                a,
                b,
                path_count,
                endpoint_mcd: mcd(ca, cb).expect("same dimension"),
                endpoint_cd_sum: ca.as_slice().iter().zip(cb.as_slice()).map(|(x, y)| circular_distance(*x, *y)).sum(),
            }
        })
        .collect();
    Ok(LinkLoadReport { rows, switch_counts: sw })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlAreaReport {
    /// Per switch, Σ over spaces of ln(control area size).
    pub log_area_sum: Vec<f64>,
    /// Pearson correlation with the per-switch path counts; NaN if undefined.
    pub correlation: f64,
}

/// Control areas of every switch in every space.
pub fn control_areas(t: &Topology) -> Vec<Vec<f64>> {
    let n = t.switch_count();
    let mut out = vec![vec![0.0; t.spaces()]; n];
    for space in 0..t.spaces() {
        let order = t.ring_order(space);
        for (i, &s) in order.iter().enumerate() {
            let left = order[(i + n - 1) % n];
            let right = order[(i + 1) % n];
            out[s.0][space] = control_area_size(t.coords(s)[space], t.coords(left)[space], t.coords(right)[space]);
        }
    }
    out
}

pub fn control_area_report(t: &Topology, switch_counts: &[u64]) -> ControlAreaReport {
    let log_area_sum: Vec<f64> = control_areas(t).iter().map(|a| a.iter().map(|x| x.ln()).sum()).collect();
    let counts: Vec<f64> = switch_counts.iter().map(|&c| c as f64).collect();
    let correlation = pearson(&log_area_sum, &counts);
    ControlAreaReport {
        log_area_sum,
        correlation,
    }
}
