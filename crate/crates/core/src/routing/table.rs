use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::Coordinates;
use crate::topology::{Graph, SwitchId};

/// A switch two hops away and the neighbors through which it is reached.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoHopEntry {
    pub target: SwitchId,
    pub coords: Coordinates,
    /// One-hop neighbors adjacent to `target`, sorted.
    pub vias: Vec<SwitchId>,
}

/// The coordinates a switch stores for forwarding.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTable {
    pub owner: SwitchId,
    pub one_hop: Vec<(SwitchId, Coordinates)>,
    pub two_hop: Vec<TwoHopEntry>,
}

impl RoutingTable {
    /// Builds the table of `owner`; `k_hops` is 1 or 2.
    pub fn build(graph: &Graph, coords: &[Coordinates], owner: SwitchId, k_hops: usize) -> Result<Self> {
        if owner.0 >= graph.node_count() {
            return Err(Error::UnknownSwitch(owner));
        }
        if !(1..=2).contains(&k_hops) {
            return Err(Error::Parameter(format!("k_hops must be 1 or 2, got {k_hops}")));
        }
        let nbrs = graph.neighbors(owner);
        let one_hop = nbrs.iter().map(|&n| (n, coords[n.0].clone())).collect();

        let mut two_hop = Vec::new();
        if k_hops == 2 {
            let mut vias: BTreeMap<SwitchId, Vec<SwitchId>> = BTreeMap::new();
            for &n in nbrs {
                for &x in graph.neighbors(n) {
                    if x != owner && nbrs.binary_search(&x).is_err() {
                        vias.entry(x).or_default().push(n);
                    }
                }
            }
            two_hop = vias
                .into_iter()
                .map(|(target, vias)| TwoHopEntry {
                    target,
                    coords: coords[target.0].clone(),
                    vias,
                })
                .collect();
        }
        Ok(Self {
            owner,
            one_hop,
            two_hop,
        })
    }

    /// Stored coordinate entries: one per one-hop and per two-hop neighbor.
    pub fn entry_count(&self) -> usize {
        self.one_hop.len() + self.two_hop.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{CoordMode, DeployParams, Topology};
    use std::collections::{BTreeSet, VecDeque};

    fn bfs_depth(graph: &Graph, src: SwitchId) -> Vec<Option<usize>> {
        let mut dist = vec![None; graph.node_count()];
        dist[src.0] = Some(0);
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            for &v in graph.neighbors(u) {
                if dist[v.0].is_none() {
                    dist[v.0] = Some(dist[u.0].unwrap() + 1);
                    q.push_back(v);
                }
            }
        }
        dist
    }

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(2, [(SwitchId(0), SwitchId(1))]);
        let coords = vec![
            Coordinates::from_values(&[0.1]).unwrap(),
            Coordinates::from_values(&[0.6]).unwrap(),
        ];
        for s in 0..2 {
            let t = RoutingTable::build(&g, &coords, SwitchId(s), 2).unwrap();
            assert_eq!(t.one_hop.len(), 1);
            assert!(t.two_hop.is_empty());
        }
        assert!(matches!(
            RoutingTable::build(&g, &coords, SwitchId(5), 1),
            Err(Error::UnknownSwitch(_))
        ));
    }

    #[test]
    fn two_hop_matches_bfs_frontier() {
        for seed in 0..10 {
            let params = DeployParams::new(60 + seed as usize * 10, 120, 10).coord_mode(CoordMode::PureRandom);
            let t = Topology::deploy_seeded(&params, seed).unwrap();
            let g = t.graph();
            let coords = t.all_coords();
            for s in 0..t.switch_count() {
                let table = RoutingTable::build(&g, &coords, SwitchId(s), 2).unwrap();
                let depth = bfs_depth(&g, SwitchId(s));
                let frontier: BTreeSet<_> = (0..g.node_count())
                    .filter(|&i| depth[i] == Some(2))
                    .map(SwitchId)
                    .collect();
                let got: BTreeSet<_> = table.two_hop.iter().map(|e| e.target).collect();
                assert_eq!(got, frontier);
                let d = table.one_hop.len();
                assert!(table.two_hop.len() <= d * d);
                for e in &table.two_hop {
                    assert!(!e.vias.is_empty());
                    for v in &e.vias {
                        assert!(g.has_edge(SwitchId(s), *v) && g.has_edge(*v, e.target));
                    }
                }
                let k1 = RoutingTable::build(&g, &coords, SwitchId(s), 1).unwrap();
                assert!(k1.two_hop.is_empty());
                assert_eq!(k1.one_hop, table.one_hop);
            }
        }
    }
}
