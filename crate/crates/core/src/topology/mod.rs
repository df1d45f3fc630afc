//! S2 topologies.
//!
//! A topology is a set of top-of-rack switches, each holding one coordinate
//! per virtual ring space. In every space a switch is cabled to its two
//! ring-adjacent switches; leftover inter-switch ports are paired randomly.
//! A physical edge remembers every reason it exists (one ring role per space
//! in which its endpoints are adjacent, plus possibly a random pairing).

mod build;
mod graph;
mod io;
mod regular;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::Coordinates;

pub use build::{balanced_coordinate, CoordMode, DeployParams};
pub use graph::Graph;
pub use io::{parse_coordinate_list, FORMAT_VERSION};
pub use regular::generate_random_regular;

/// Dense switch index in `[0, N)`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct SwitchId(pub usize);

impl SwitchId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for SwitchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// Why a physical edge exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeRole {
    /// Ring adjacency in the given space, numbered from 1.
    Ring(usize),
    RandomPairing,
}

impl fmt::Display for EdgeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeRole::Ring(space) => write!(f, "ring:{space}"),
            EdgeRole::RandomPairing => f.write_str("random"),
        }
    }
}

impl std::str::FromStr for EdgeRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            return Ok(EdgeRole::RandomPairing);
        }
        s.strip_prefix("ring:")
            .and_then(|n| n.parse::<usize>().ok())
            .map(EdgeRole::Ring)
            .ok_or_else(|| format!("unknown edge role {s:?}"))
    }
}

/// Undirected physical edge, endpoints stored as `a < b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub a: SwitchId,
    pub b: SwitchId,
    pub roles: BTreeSet<EdgeRole>,
}

impl Edge {
    pub fn other(&self, end: SwitchId) -> SwitchId {
        if end == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Switch {
    pub id: SwitchId,
    pub coords: Coordinates,
    pub servers: usize,
}

#[inline]
pub(crate) fn edge_key(x: SwitchId, y: SwitchId) -> (SwitchId, SwitchId) {
    if x < y {
        (x, y)
    } else {
        (y, x)
    }
}

/// An S2 network: switches with coordinates and servers, plus role-tagged edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    spaces: usize,
    ports: usize,
    seed: Option<u64>,
    switches: Vec<Switch>,
    edges: BTreeMap<(SwitchId, SwitchId), BTreeSet<EdgeRole>>,
}

impl Topology {
    /// Assembles a topology from raw parts and checks every invariant.
    pub fn from_parts(
        spaces: usize,
        ports: usize,
        seed: Option<u64>,
        switches: Vec<Switch>,
        edges: Vec<Edge>,
    ) -> crate::Result<Self> {
        let mut violations = Vec::new();
        let mut map = BTreeMap::new();
        for e in edges {
            if e.a == e.b {
                violations.push(format!("self-loop on {}", e.a));
                continue;
            }
            if e.roles.is_empty() {
                violations.push(format!("edge {}-{} has no roles", e.a, e.b));
            }
            if map.insert(edge_key(e.a, e.b), e.roles).is_some() {
                violations.push(format!("duplicate edge {}-{}", e.a, e.b));
            }
        }
        let t = Self {
            spaces,
            ports,
            seed,
            switches,
            edges: map,
        };
        violations.extend(t.violations());
        if violations.is_empty() {
            Ok(t)
        } else {
            Err(crate::Error::Validation(violations))
        }
    }

    pub(crate) fn empty(spaces: usize, ports: usize, seed: Option<u64>) -> Self {
        Self {
            spaces,
            ports,
            seed,
            switches: Vec::new(),
            edges: BTreeMap::new(),
        }
    }

    /// Number of virtual spaces `L`.
    pub fn spaces(&self) -> usize {
        self.spaces
    }

    /// Ports per switch `w`.
    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn server_count(&self) -> usize {
        self.switches.iter().map(|s| s.servers).sum()
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn switch(&self, id: SwitchId) -> Option<&Switch> {
        self.switches.get(id.0)
    }

    pub fn coords(&self, id: SwitchId) -> &Coordinates {
        &self.switches[id.0].coords
    }

    pub fn all_coords(&self) -> Vec<Coordinates> {
        self.switches.iter().map(|s| s.coords.clone()).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|(&(a, b), roles)| Edge {
            a,
            b,
            roles: roles.clone(),
        })
    }

    pub fn edge_roles(&self, x: SwitchId, y: SwitchId) -> Option<&BTreeSet<EdgeRole>> {
        self.edges.get(&edge_key(x, y))
    }

    pub fn are_connected(&self, x: SwitchId, y: SwitchId) -> bool {
        self.edges.contains_key(&edge_key(x, y))
    }

    /// Inter-switch neighbors of `id`, sorted.
    pub fn neighbors(&self, id: SwitchId) -> Vec<SwitchId> {
        let mut out: Vec<SwitchId> = self
            .edges
            .keys()
            .filter_map(|&(a, b)| {
                if a == id {
                    Some(b)
                } else if b == id {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Inter-switch degree of every switch.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.switches.len()];
        for &(a, b) in self.edges.keys() {
            deg[a.0] += 1;
            deg[b.0] += 1;
        }
        deg
    }

    /// Inter-switch ports available to a switch: at most `2L`, and never more
    /// than what its servers leave free.
    pub fn port_budget(&self, id: SwitchId) -> usize {
        (2 * self.spaces).min(self.ports.saturating_sub(self.switches[id.0].servers))
    }

    /// Unused inter-switch ports per switch.
    pub fn free_ports(&self) -> Vec<usize> {
        self.degrees()
            .into_iter()
            .enumerate()
            .map(|(i, d)| self.port_budget(SwitchId(i)).saturating_sub(d))
            .collect()
    }

    /// Switches sorted by coordinate in `space` (0-based).
    pub fn ring_order(&self, space: usize) -> Vec<SwitchId> {
        ring_order(&self.switches, space)
    }

    /// The undirected switch graph.
    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.switches.len(), self.edges.keys().copied())
    }

    /// Switch that each server attaches to, servers numbered switch-major.
    pub fn server_switches(&self) -> Vec<SwitchId> {
        self.switches
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.id, s.servers))
            .collect()
    }

    /// Every invariant violation, as human-readable diagnostics.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let l = self.spaces;
        if l == 0 {
            out.push("space count L must be at least 1".to_string());
            return out;
        }
        for (i, s) in self.switches.iter().enumerate() {
            if s.id.0 != i {
                out.push(format!("switch at position {i} has id {}", s.id.0));
            }
            if s.coords.spaces() != l {
                out.push(format!(
                    "switch {} has {} coordinates, expected L={l}",
                    s.id,
                    s.coords.spaces()
                ));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let n = self.switches.len();
        for &(a, b) in self.edges.keys() {
            if a.0 >= n || b.0 >= n {
                out.push(format!("edge {a}-{b} references an unknown switch"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for &(a, b) in self.edges.keys() {
            if a == b {
                out.push(format!("self-loop on {a}"));
            }
        }
        for ((a, b), roles) in &self.edges {
            for role in roles {
                if let EdgeRole::Ring(space) = role {
                    if *space == 0 || *space > l {
                        out.push(format!("edge {a}-{b} has ring role for space {space} outside [1, {l}]"));
                    }
                }
            }
        }

        for space in 0..l {
            let mut seen = HashSet::new();
            for s in &self.switches {
                if !seen.insert(s.coords[space].value().to_bits()) {
                    out.push(format!(
                        "duplicate coordinate {} in space {} (switch {})",
                        s.coords[space],
                        space + 1,
                        s.id
                    ));
                }
            }
            let expected = ring_pairs(&ring_order(&self.switches, space));
            let actual: BTreeSet<_> = self
                .edges
                .iter()
                .filter(|(_, roles)| roles.contains(&EdgeRole::Ring(space + 1)))
                .map(|(&k, _)| k)
                .collect();
            for (a, b) in expected.difference(&actual) {
                out.push(format!("missing ring edge {a}-{b} in space {}", space + 1));
            }
            for (a, b) in actual.difference(&expected) {
                out.push(format!("edge {a}-{b} carries ring role {} but is not ring-adjacent", space + 1));
            }
        }

        for (i, d) in self.degrees().into_iter().enumerate() {
            let s = &self.switches[i];
            if d > 2 * l {
                out.push(format!("switch {} has inter-switch degree {d} > 2L = {}", s.id, 2 * l));
            }
            if d + s.servers > self.ports {
                out.push(format!(
                    "switch {} uses {d} inter-switch + {} server ports > w = {}",
                    s.id, s.servers, self.ports
                ));
            }
        }
        out
    }

    pub(crate) fn add_role(&mut self, x: SwitchId, y: SwitchId, role: EdgeRole) {
        debug_assert_ne!(x, y);
        self.edges.entry(edge_key(x, y)).or_default().insert(role);
    }

    /// Removes `role` from edge `x-y`; deletes the edge once it has no roles left.
    pub(crate) fn remove_role(&mut self, x: SwitchId, y: SwitchId, role: EdgeRole) {
        let key = edge_key(x, y);
        if let Some(roles) = self.edges.get_mut(&key) {
            roles.remove(&role);
            if roles.is_empty() {
                self.edges.remove(&key);
            }
        }
    }

    /// Removes an edge outright, whatever its roles.
    pub fn remove_edge(&mut self, x: SwitchId, y: SwitchId) -> bool {
        self.edges.remove(&edge_key(x, y)).is_some()
    }
}

pub(crate) fn ring_order(switches: &[Switch], space: usize) -> Vec<SwitchId> {
    let mut order: Vec<SwitchId> = switches.iter().map(|s| s.id).collect();
    order.sort_by(|x, y| {
        switches[x.0].coords[space]
            .value()
            .total_cmp(&switches[y.0].coords[space].value())
            .then(x.cmp(y))
    });
    order
}

/// Unordered cyclic-neighbor pairs of a ring given in sorted order.
pub(crate) fn ring_pairs(order: &[SwitchId]) -> BTreeSet<(SwitchId, SwitchId)> {
    let n = order.len();
    let mut out = BTreeSet::new();
    if n < 2 {
        return out;
    }
    for j in 0..n {
        let (x, y) = (order[j], order[(j + 1) % n]);
        out.insert(edge_key(x, y));
    }
    out
}
