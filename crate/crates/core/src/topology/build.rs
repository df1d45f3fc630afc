//! Topology construction: coordinate generation, ring wiring, free-port
//! pairing and incremental expansion.

use std::collections::{BTreeSet, HashSet};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{edge_key, ring_pairs, EdgeRole, Switch, SwitchId, Topology};
use crate::error::{Error, Result};
use crate::geometry::{Coordinates, RingCoordinate};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CoordMode {
    PureRandom,
    #[default]
    Balanced,
}

impl std::str::FromStr for CoordMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pure_random" | "pure-random" | "random" => Ok(CoordMode::PureRandom),
            "balanced" => Ok(CoordMode::Balanced),
            other => Err(format!("unknown coordinate mode {other:?}")),
        }
    }
}

/// Parameters of a deploy-as-a-whole build.
#[derive(Debug, Clone, PartialEq)]
pub struct DeployParams {
    pub switches: usize,
    pub servers: usize,
    pub ports: usize,
    pub coord_mode: CoordMode,
    /// Explicit coordinates, one entry per switch; replaces generation.
    pub coordinate_override: Option<Vec<Coordinates>>,
}

impl DeployParams {
    pub fn new(switches: usize, servers: usize, ports: usize) -> Self {
        Self {
            switches,
            servers,
            ports,
            coord_mode: CoordMode::Balanced,
            coordinate_override: None,
        }
    }

    pub fn coord_mode(mut self, mode: CoordMode) -> Self {
        self.coord_mode = mode;
        self
    }

    pub fn with_coordinates(mut self, coords: Vec<Coordinates>) -> Self {
        self.coordinate_override = Some(coords);
        self
    }

    /// `L = ⌊(w − ⌈H/N⌉) / 2⌋`.
    pub fn space_count(&self) -> Result<usize> {
        if self.switches < 2 {
            return Err(Error::Config(format!(
                "need at least 2 switches, got {}",
                self.switches
            )));
        }
        let per_switch = self.servers.div_ceil(self.switches);
        if per_switch > self.ports {
            return Err(Error::Config(format!(
                "{per_switch} servers per switch exceed {} ports",
                self.ports
            )));
        }
        let l = (self.ports - per_switch) / 2;
        if l < 1 {
            return Err(Error::Config(format!(
                "w={} ports with {per_switch} servers per switch leaves no room for a single space",
                self.ports
            )));
        }
        Ok(l)
    }
}

/// Draws a new ring coordinate at distance at least `1/(3n)` from all `n`
/// existing ones by splitting the widest gap.
pub fn balanced_coordinate(existing: &[RingCoordinate], rng: &mut Rng) -> RingCoordinate {
    let mut sorted: Vec<f64> = existing.iter().map(|c| c.value()).collect();
    sorted.sort_by(f64::total_cmp);
    balanced_in_sorted(&sorted, rng)
}

/// Widest cyclic gap of a sorted ring as `(start, end)`, with `end` unwrapped
/// past 1 when the gap crosses zero. Ties go to the lowest start.
pub(crate) fn widest_gap(sorted: &[f64]) -> (f64, f64) {
    let n = sorted.len();
    debug_assert!(n > 0);
    let wrap = (sorted[n - 1], sorted[0] + 1.0);
    let mut best: Option<(f64, f64)> = None;
    for w in sorted.windows(2) {
        if best.is_none_or(|(a, b)| w[1] - w[0] > b - a) {
            best = Some((w[0], w[1]));
        }
    }
    // the wrapping gap starts at the largest coordinate, so it loses ties
    match best {
        Some((a, b)) if b - a >= wrap.1 - wrap.0 => (a, b),
        _ => wrap,
    }
}

fn balanced_in_sorted(sorted: &[f64], rng: &mut Rng) -> RingCoordinate {
    let n = sorted.len();
    if n == 0 {
        return RingCoordinate::new(rng.gen::<f64>());
    }
    let (a, b) = widest_gap(sorted);
    let margin = 1.0 / (3.0 * n as f64);
    let t = rng.gen_range(a + margin..b - margin);
    RingCoordinate::new(t)
}

/// Per-space coordinate generator that remembers what it has handed out.
pub(crate) struct CoordinateGenerator {
    mode: CoordMode,
    // sorted per space
    rings: Vec<Vec<f64>>,
    taken: Vec<HashSet<u64>>,
}

impl CoordinateGenerator {
    pub(crate) fn new(mode: CoordMode, spaces: usize) -> Self {
        Self {
            mode,
            rings: vec![Vec::new(); spaces],
            taken: vec![HashSet::new(); spaces],
        }
    }

    pub(crate) fn from_existing(mode: CoordMode, coords: &[Coordinates], spaces: usize) -> Self {
        let mut g = Self::new(mode, spaces);
        for c in coords {
            g.record(c);
        }
        g
    }

    pub(crate) fn contains(&self, space: usize, value: f64) -> bool {
        self.taken[space].contains(&value.to_bits())
    }

    pub(crate) fn record(&mut self, c: &Coordinates) {
        for (space, ring) in self.rings.iter_mut().enumerate() {
            let v = c[space].value();
            let pos = ring.partition_point(|&x| x < v);
            ring.insert(pos, v);
            self.taken[space].insert(v.to_bits());
        }
    }

    pub(crate) fn next(&mut self, rng: &mut Rng) -> Coordinates {
        let mut per_space = Vec::with_capacity(self.rings.len());
        for space in 0..self.rings.len() {
            let c = loop {
                let c = match self.mode {
                    CoordMode::PureRandom => RingCoordinate::new(rng.gen::<f64>()),
                    CoordMode::Balanced => balanced_in_sorted(&self.rings[space], rng),
                };
                if !self.contains(space, c.value()) {
                    break c;
                }
            };
            per_space.push(c);
        }
        let coords = Coordinates::new(per_space).expect("at least one space");
        self.record(&coords);
        coords
    }
}

/// Server counts for `switches` switches sharing `servers` round-robin.
fn spread(servers: usize, switches: usize) -> Vec<usize> {
    (0..switches)
        .map(|i| servers / switches + usize::from(i < servers % switches))
        .collect()
}

impl Topology {
    /// Deploy-as-a-whole construction with a fresh generator seeded from `seed`.
    pub fn deploy_seeded(params: &DeployParams, seed: u64) -> Result<Self> {
        let mut rng = rng::seeded(seed);
        let mut t = Self::deploy(params, &mut rng)?;
        t.seed = Some(seed);
        Ok(t)
    }

    /// Deploy-as-a-whole construction: assign servers, generate coordinates,
    /// wire every ring, then pair leftover ports at random.
    pub fn deploy(params: &DeployParams, rng: &mut Rng) -> Result<Self> {
        let l = params.space_count()?;
        let n = params.switches;
        let coords = match &params.coordinate_override {
            Some(list) => {
                if list.len() != n {
                    return Err(Error::Config(format!(
                        "coordinate override lists {} switches, expected {n}",
                        list.len()
                    )));
                }
                for (i, c) in list.iter().enumerate() {
                    if c.spaces() != l {
                        return Err(Error::Config(format!(
                            "override for switch {i} has {} coordinates, L={l}",
                            c.spaces()
                        )));
                    }
                }
                for space in 0..l {
                    let mut seen = HashSet::new();
                    for (i, c) in list.iter().enumerate() {
                        if !seen.insert(c[space].value().to_bits()) {
                            return Err(Error::Config(format!(
                                "override repeats coordinate {} in space {} (switch {i})",
                                c[space],
                                space + 1
                            )));
                        }
                    }
                }
                list.clone()
            }
            None => {
                let mut generator = CoordinateGenerator::new(params.coord_mode, l);
                (0..n).map(|_| generator.next(rng)).collect()
            }
        };

        let mut t = Topology::empty(l, params.ports, None);
        t.switches = coords
            .into_iter()
            .zip(spread(params.servers, n))
            .enumerate()
            .map(|(i, (coords, servers))| Switch {
                id: SwitchId(i),
                coords,
                servers,
            })
            .collect();
        for space in 0..l {
            for (a, b) in ring_pairs(&t.ring_order(space)) {
                t.add_role(a, b, EdgeRole::Ring(space + 1));
            }
        }
        t.connect_free_ports(rng);
        Ok(t)
    }

    /// Links random pairs of switches that both still have free inter-switch
    /// ports and are not yet neighbors, until no such pair remains.
    ///
    /// Returns the number of edges added.
    pub fn connect_free_ports(&mut self, rng: &mut Rng) -> usize {
        let mut added = 0;
        let mut free = self.free_ports();
        loop {
            let open: Vec<SwitchId> = free
                .iter()
                .enumerate()
                .filter(|(_, &f)| f > 0)
                .map(|(i, _)| SwitchId(i))
                .collect();
            let mut legal = Vec::new();
            for (i, &x) in open.iter().enumerate() {
                for &y in &open[i + 1..] {
                    if !self.are_connected(x, y) {
                        legal.push((x, y));
                    }
                }
            }
            if legal.is_empty() {
                return added;
            }
            let (x, y) = legal[rng.gen_range(0..legal.len())];
            self.add_role(x, y, EdgeRole::RandomPairing);
            free[x.0] -= 1;
            free[y.0] -= 1;
            added += 1;
        }
    }

    /// Expands the network by `servers_to_add` servers, adding
    /// `⌈m / (w − 2L)⌉` switches one at a time and re-pairing free ports at
    /// the end. Returns the ids of the new switches.
    pub fn add_switches_incremental(
        &mut self,
        servers_to_add: usize,
        coord_mode: CoordMode,
        rng: &mut Rng,
    ) -> Result<Vec<SwitchId>> {
        let per_switch = self.ports.saturating_sub(2 * self.spaces);
        if per_switch == 0 {
            return Err(Error::Config(format!(
                "w={} leaves no server ports next to 2L={} inter-switch ports",
                self.ports,
                2 * self.spaces
            )));
        }
        let count = servers_to_add.div_ceil(per_switch);
        let mut generator = CoordinateGenerator::from_existing(coord_mode, &self.all_coords(), self.spaces);
        let mut added = Vec::with_capacity(count);
        for servers in spread(servers_to_add, count) {
            let coords = generator.next(rng);
            added.push(self.splice_switch(coords, servers, rng)?);
        }
        self.connect_free_ports(rng);
        Ok(added)
    }

    /// Inserts one switch at explicit coordinates, then re-pairs free ports.
    pub fn insert_switch(&mut self, coords: Coordinates, servers: usize, rng: &mut Rng) -> Result<SwitchId> {
        let id = self.splice_switch(coords, servers, rng)?;
        self.connect_free_ports(rng);
        Ok(id)
    }

    /// Places a new switch on every ring: in each space the cable between the
    /// two switches now flanking it is replaced by two cables to the newcomer.
    fn splice_switch(&mut self, coords: Coordinates, servers: usize, rng: &mut Rng) -> Result<SwitchId> {
        if coords.spaces() != self.spaces {
            return Err(Error::Dimension {
                expected: self.spaces,
                got: coords.spaces(),
            });
        }
        if servers + 2 * self.spaces > self.ports {
            return Err(Error::Config(format!(
                "{servers} servers plus 2L={} inter-switch ports exceed w={}",
                2 * self.spaces,
                self.ports
            )));
        }
        for space in 0..self.spaces {
            let v = coords[space].value().to_bits();
            if self.switches.iter().any(|s| s.coords[space].value().to_bits() == v) {
                return Err(Error::Config(format!(
                    "coordinate {} already used in space {}",
                    coords[space],
                    space + 1
                )));
            }
        }

        let before: Vec<_> = (0..self.spaces).map(|sp| ring_pairs(&self.ring_order(sp))).collect();
        let id = SwitchId(self.switches.len());
        self.switches.push(Switch { id, coords, servers });
        for (space, old) in before.into_iter().enumerate() {
            let new = ring_pairs(&self.ring_order(space));
            let role = EdgeRole::Ring(space + 1);
            for &(a, b) in old.difference(&new) {
                self.remove_role(a, b, role);
            }
            for &(a, b) in new.difference(&old) {
                self.add_role(a, b, role);
            }
        }
        self.shed_excess_pairings(rng);
        Ok(id)
    }

    /// A switch whose old ring cable survives because it also carries a
    /// random pairing can end up one port over budget after a splice; drop
    /// random-only cables from such switches.
    fn shed_excess_pairings(&mut self, rng: &mut Rng) {
        loop {
            let degrees = self.degrees();
            let Some(over) = (0..self.switches.len())
                .map(SwitchId)
                .find(|&s| degrees[s.0] > self.port_budget(s))
            else {
                return;
            };
            let random_only: Vec<SwitchId> = self
                .neighbors(over)
                .into_iter()
                .filter(|&x| {
                    self.edges
                        .get(&edge_key(over, x))
                        .is_some_and(|r| r.iter().all(|role| *role == EdgeRole::RandomPairing))
                })
                .collect();
            // ring roles alone never exceed 2L distinct neighbors
            let victim = random_only[rng.gen_range(0..random_only.len())];
            self.remove_edge(over, victim);
        }
    }

    /// Edges holding ring role `space` (1-based).
    pub fn ring_edges(&self, space: usize) -> BTreeSet<(SwitchId, SwitchId)> {
        self.edges
            .iter()
            .filter(|(_, roles)| roles.contains(&EdgeRole::Ring(space)))
            .map(|(&k, _)| k)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::circular_distance;
    use crate::topology::ring_order;

    pub(crate) fn nine_switch_coords() -> Vec<Coordinates> {
        [
            [0.05, 0.17],
            [0.13, 0.62],
            [0.23, 0.91],
            [0.36, 0.42],
            [0.42, 0.53],
            [0.51, 0.58],
            [0.63, 0.73],
            [0.78, 0.26],
            [0.91, 0.97],
        ]
        .iter()
        .map(|c| Coordinates::from_values(c).unwrap())
        .collect()
    }

    const A: SwitchId = SwitchId(0);
    const B: SwitchId = SwitchId(1);
    const C: SwitchId = SwitchId(2);
    const D: SwitchId = SwitchId(3);
    const E: SwitchId = SwitchId(4);
    const F: SwitchId = SwitchId(5);
    const G: SwitchId = SwitchId(6);
    const H: SwitchId = SwitchId(7);
    const I: SwitchId = SwitchId(8);

    fn nine_switch_rings_only() -> Topology {
        let params = DeployParams::new(9, 18, 6).with_coordinates(nine_switch_coords());
        let mut t = Topology::empty(params.space_count().unwrap(), 6, None);
        t.switches = nine_switch_coords()
            .into_iter()
            .enumerate()
            .map(|(i, coords)| Switch { id: SwitchId(i), coords, servers: 2 })
            .collect();
        for space in 0..2 {
            for (a, b) in ring_pairs(&t.ring_order(space)) {
                t.add_role(a, b, EdgeRole::Ring(space + 1));
            }
        }
        t
    }

    #[test]
    fn nine_switch_space_count_and_servers() {
        let params = DeployParams::new(9, 18, 6).with_coordinates(nine_switch_coords());
        assert_eq!(params.space_count().unwrap(), 2);
        let t = Topology::deploy_seeded(&params, 7).unwrap();
        assert!(t.switches().iter().all(|s| s.servers == 2));
        assert!(t.violations().is_empty(), "{:?}", t.violations());
    }

    #[test]
    fn nine_switch_ring_adjacency() {
        let t = Topology::deploy_seeded(&DeployParams::new(9, 18, 6).with_coordinates(nine_switch_coords()), 7).unwrap();
        let s1 = t.ring_edges(1);
        let s2 = t.ring_edges(2);
        let b1: Vec<_> = s1.iter().filter(|(x, y)| *x == B || *y == B).copied().collect();
        let b2: Vec<_> = s2.iter().filter(|(x, y)| *x == B || *y == B).copied().collect();
        assert_eq!(b1, vec![(A, B), (B, C)]);
        assert_eq!(b2, vec![(B, F), (B, G)]);
        let ring_nbrs_a: BTreeSet<_> = s1
            .iter()
            .chain(&s2)
            .filter(|(x, y)| *x == A || *y == A)
            .map(|&(x, y)| if x == A { y } else { x })
            .collect();
        assert_eq!(ring_nbrs_a, BTreeSet::from([B, H, I]));
        assert_eq!(
            t.edge_roles(A, I).unwrap(),
            &BTreeSet::from([EdgeRole::Ring(1), EdgeRole::Ring(2)])
        );
    }

    #[test]
    fn nine_switch_free_ports_after_rings() {
        let t = nine_switch_rings_only();
        let free = t.free_ports();
        // hand count from the two sorted rings
        assert_eq!(free, vec![1, 0, 0, 1, 2, 1, 0, 0, 1]);
        let _ = (C, D, E, F, G, H, I);
    }

    #[test]
    fn nine_switch_pairing_outcomes() {
        // every outcome must be a legal pairing among {A, D, E, F, I}
        let mut saw_a_e = false;
        for seed in 0..64 {
            let mut t = nine_switch_rings_only();
            let mut r = rng::seeded(seed);
            t.connect_free_ports(&mut r);
            assert!(t.violations().is_empty());
            for e in t.edges().filter(|e| e.roles.contains(&EdgeRole::RandomPairing)) {
                assert!([A, D, E, F, I].contains(&e.a) && [A, D, E, F, I].contains(&e.b));
                if (e.a, e.b) == (A, E) {
                    saw_a_e = true;
                }
            }
            // no legal pair left behind
            let free = t.free_ports();
            let open: Vec<_> = (0..9).filter(|&i| free[i] > 0).collect();
            for (i, &x) in open.iter().enumerate() {
                for &y in &open[i + 1..] {
                    assert!(t.are_connected(SwitchId(x), SwitchId(y)));
                }
            }
        }
        assert!(saw_a_e);
    }

    #[test]
    fn pairing_noop_cases() {
        let mut r = rng::seeded(1);
        // three switches, one space, w=2: full ring, no free ports
        let mut t = Topology::deploy(&DeployParams::new(3, 0, 2), &mut r).unwrap();
        let before = t.clone();
        assert_eq!(t.connect_free_ports(&mut r), 0);
        assert_eq!(t, before);
        // two switches, one space: single edge with two ring sides, one free port each but already linked
        let mut t = Topology::deploy(&DeployParams::new(2, 0, 2), &mut r).unwrap();
        assert_eq!(t.edge_count(), 1);
        assert_eq!(t.connect_free_ports(&mut r), 0);
    }

    #[test]
    fn infeasible_parameters() {
        assert!(matches!(DeployParams::new(9, 18, 3).space_count(), Err(Error::Config(_))));
        assert!(matches!(DeployParams::new(1, 0, 6).space_count(), Err(Error::Config(_))));
        assert!(matches!(DeployParams::new(4, 40, 6).space_count(), Err(Error::Config(_))));
    }

    #[test]
    fn balanced_examples() {
        let mut r = rng::seeded(3);
        for _ in 0..200 {
            let c = balanced_coordinate(&[], &mut r).value();
            assert!((0.0..1.0).contains(&c));
            let c = balanced_coordinate(&[RingCoordinate::new(0.2)], &mut r);
            assert!(c.value() > 0.2 + 1.0 / 3.0 - 1e-12 && c.value() < 1.2 - 1.0 / 3.0);
            assert!(circular_distance(c, RingCoordinate::new(0.2)) >= 1.0 / 3.0 - 1e-12);
        }
    }

    #[test]
    fn balanced_two_points_equal_gaps_picks_lowest_start() {
        // gaps 0.0->0.5 and 0.5->1.0 tie; the one starting at 0.0 wins
        let mut r = rng::seeded(5);
        let existing = [RingCoordinate::new(0.0), RingCoordinate::new(0.5)];
        for _ in 0..200 {
            let c = balanced_coordinate(&existing, &mut r);
            assert!(c.value() >= 1.0 / 6.0 - 1e-12 && c.value() < 1.0 / 3.0 + 1e-12, "{c}");
            for e in existing {
                assert!(circular_distance(c, e) >= 1.0 / 6.0 - 1e-12);
            }
        }
    }

    #[test]
    fn widest_gap_wraps() {
        assert_eq!(widest_gap(&[0.3, 0.5]), (0.5, 1.3));
        assert_eq!(widest_gap(&[0.1, 0.9]), (0.1, 0.9));
        assert_eq!(widest_gap(&[0.4]), (0.4, 1.4));
    }

    #[test]
    fn incremental_ring_insertion() {
        let mut r = rng::seeded(0);
        let params = DeployParams::new(2, 0, 2).with_coordinates(vec![
            Coordinates::from_values(&[0.1]).unwrap(),
            Coordinates::from_values(&[0.6]).unwrap(),
        ]);
        let mut t = Topology::deploy(&params, &mut r).unwrap();
        let s = t.insert_switch(Coordinates::from_values(&[0.3]).unwrap(), 0, &mut r).unwrap();
        assert_eq!(s, SwitchId(2));
        let ring: Vec<_> = t.ring_edges(1).into_iter().collect();
        assert_eq!(ring, vec![(SwitchId(0), SwitchId(1)), (SwitchId(0), s), (SwitchId(1), s)]);
        assert!(t.violations().is_empty());

        // a fourth switch at 0.8 splits the arc 0.6 -> 0.1
        t.insert_switch(Coordinates::from_values(&[0.8]).unwrap(), 0, &mut r).unwrap();
        assert!(!t.are_connected(SwitchId(0), SwitchId(1)));
        assert!(t.violations().is_empty());
    }

    #[test]
    fn incremental_keeps_edge_with_surviving_role() {
        // u=0 and v=1 are adjacent in both spaces; the newcomer splits only space 1
        let mut r = rng::seeded(0);
        let coords = vec![
            Coordinates::from_values(&[0.1, 0.2]).unwrap(),
            Coordinates::from_values(&[0.3, 0.4]).unwrap(),
            Coordinates::from_values(&[0.7, 0.8]).unwrap(),
        ];
        let mut t = Topology::deploy(&DeployParams::new(3, 0, 4).with_coordinates(coords), &mut r).unwrap();
        assert_eq!(
            t.edge_roles(SwitchId(0), SwitchId(1)).unwrap(),
            &BTreeSet::from([EdgeRole::Ring(1), EdgeRole::Ring(2)])
        );
        let s = t
            .insert_switch(Coordinates::from_values(&[0.2, 0.6]).unwrap(), 0, &mut r)
            .unwrap();
        assert_eq!(
            t.edge_roles(SwitchId(0), SwitchId(1)).unwrap(),
            &BTreeSet::from([EdgeRole::Ring(2)])
        );
        assert!(t.edge_roles(SwitchId(0), s).unwrap().contains(&EdgeRole::Ring(1)));
        assert!(t.edge_roles(SwitchId(1), s).unwrap().contains(&EdgeRole::Ring(1)));
        assert!(t.violations().is_empty(), "{:?}", t.violations());
    }

    #[test]
    fn incremental_switch_count() {
        // m=5, w=12, L=5 -> ceil(5/2) = 3 new switches
        let mut r = rng::seeded(9);
        let mut t = Topology::deploy(&DeployParams::new(20, 40, 12), &mut r).unwrap();
        assert_eq!(t.spaces(), 5);
        let added = t.add_switches_incremental(5, CoordMode::Balanced, &mut r).unwrap();
        assert_eq!(added.len(), 3);
        assert_eq!(t.switch_count(), 23);
        assert_eq!(t.server_count(), 45);
        assert!(t.violations().is_empty(), "{:?}", t.violations());
    }

    #[test]
    fn incremental_equivalence_with_deploy() {
        let mut r = rng::seeded(11);
        let whole = Topology::deploy(&DeployParams::new(40, 80, 10), &mut r).unwrap();
        let coords = whole.all_coords();
        let seed_part = DeployParams::new(2, 4, 10).with_coordinates(coords[..2].to_vec());
        let mut grown = Topology::deploy(&seed_part, &mut r).unwrap();
        for c in &coords[2..] {
            grown.insert_switch(c.clone(), 2, &mut r).unwrap();
            assert!(grown.violations().is_empty(), "{:?}", grown.violations());
        }
        for space in 1..=whole.spaces() {
            assert_eq!(grown.ring_edges(space), whole.ring_edges(space));
        }
    }

    #[test]
    fn incremental_rejects_duplicate_coordinate() {
        let mut r = rng::seeded(2);
        let mut t = Topology::deploy(&DeployParams::new(5, 5, 6), &mut r).unwrap();
        let dup = t.coords(SwitchId(2)).clone();
        assert!(t.insert_switch(dup, 1, &mut r).is_err());
    }

    #[test]
    fn balanced_separation_and_pigeonhole() {
        let mut r = rng::seeded(21);
        let mut g = CoordinateGenerator::new(CoordMode::Balanced, 3);
        let mut all: Vec<Coordinates> = Vec::new();
        for n in 0..300 {
            if n >= 1 {
                for space in 0..3 {
                    let (a, b) = widest_gap(&g.rings[space]);
                    assert!(b - a >= 1.0 / n as f64 - 1e-12);
                }
            }
            all.push(g.next(&mut r));
        }
        let bound = 1.0 / (3.0 * all.len() as f64);
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert!(crate::geometry::mcd(&all[i], &all[j]).unwrap() >= bound);
            }
        }
    }

    #[test]
    fn ring_order_sorts_by_space() {
        let t = nine_switch_rings_only();
        let order: Vec<usize> = ring_order(&t.switches, 1).into_iter().map(|s| s.0).collect();
        assert_eq!(order, vec![0, 7, 3, 4, 5, 1, 6, 2, 8]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn deploy_satisfies_invariants(
                n in 2usize..80,
                per in 0usize..4,
                extra in 2usize..10,
                seed in any::<u64>(),
                balanced in any::<bool>(),
            ) {
                let mode = if balanced { CoordMode::Balanced } else { CoordMode::PureRandom };
                let params = DeployParams::new(n, n * per, per + extra).coord_mode(mode);
                let t = Topology::deploy_seeded(&params, seed).unwrap();
                prop_assert!(t.violations().is_empty(), "{:?}", t.violations());
                let counts: Vec<_> = t.switches().iter().map(|s| s.servers).collect();
                prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
                // at most one switch keeps free ports that could still pair
                let free = t.free_ports();
                let open: Vec<_> = (0..n).filter(|&i| free[i] > 0).collect();
                for (i, &x) in open.iter().enumerate() {
                    for &y in &open[i + 1..] {
                        prop_assert!(t.are_connected(SwitchId(x), SwitchId(y)));
                    }
                }
            }

            #[test]
            fn same_seed_same_topology(seed in any::<u64>()) {
                let params = DeployParams::new(30, 60, 10);
                prop_assert_eq!(
                    Topology::deploy_seeded(&params, seed).unwrap(),
                    Topology::deploy_seeded(&params, seed).unwrap()
                );
            }

            #[test]
            fn incremental_growth_keeps_invariants(seed in any::<u64>(), m in 0usize..20) {
                let mut r = rng::seeded(seed);
                let mut t = Topology::deploy(&DeployParams::new(10, 20, 8), &mut r).unwrap();
                let before = t.switch_count();
                let added = t.add_switches_incremental(m, CoordMode::PureRandom, &mut r).unwrap();
                prop_assert_eq!(added.len(), m.div_ceil(8 - 2 * t.spaces()));
                prop_assert_eq!(t.switch_count(), before + added.len());
                prop_assert!(t.violations().is_empty(), "{:?}", t.violations());
            }
        }
    }
}
