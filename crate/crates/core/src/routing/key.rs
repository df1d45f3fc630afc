//! Routing toward data keys.
//!
//! A key is hashed onto a point of each of the first `d` rings. In every
//! space the switch circularly closest to that point is a home switch of the
//! key, and greedy routing with `d`-MCD toward the point ends at one of them.

use super::hash::{stable_hash, unit_interval};
use super::{PathRecord, RouteOptions, Router, Target};
use crate::error::{Error, Result};
use crate::geometry::{circular_distance, Coordinates, RingCoordinate};
use crate::topology::{SwitchId, Topology};

/// Distances closer than this are treated as equal when picking a home.
const TIE_TOLERANCE: f64 = 4.0 * f64::EPSILON;

/// Position of `key` on ring `r` (1-based).
pub fn key_hash(key: &[u8], r: usize) -> f64 {
    let mut bytes = Vec::with_capacity(8 + key.len());
    bytes.extend_from_slice(&(r as u64).to_le_bytes());
    bytes.extend_from_slice(key);
    unit_interval(stable_hash(&bytes))
}

/// A key together with its ring positions in the first `d` spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyAddress {
    key: Vec<u8>,
    point: Coordinates,
}

impl KeyAddress {
    pub fn new(key: impl Into<Vec<u8>>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("key address needs at least one space".into()));
        }
        let key = key.into();
        let point = Coordinates::new((1..=d).map(|r| RingCoordinate::new(key_hash(&key, r))).collect())?;
        Ok(Self { key, point })
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn spaces(&self) -> usize {
        self.point.spaces()
    }

    pub fn point(&self) -> &Coordinates {
        &self.point
    }
}

/// Switch closest to `h` in `space` (0-based); near-ties go to the larger
/// coordinate.
pub fn home_switch_in_space(coords: &[Coordinates], space: usize, h: RingCoordinate) -> SwitchId {
    let mut best: Option<(f64, f64, usize)> = None;
    for (i, c) in coords.iter().enumerate() {
        let x = c[space].value();
        let cd = circular_distance(c[space], h);
        let better = match best {
            None => true,
            Some((bd, bx, _)) => cd < bd - TIE_TOLERANCE || ((cd - bd).abs() <= TIE_TOLERANCE && x > bx),
        };
        if better {
            best = Some((cd, x, i));
        }
    }
    SwitchId(best.expect("at least one switch").2)
}

/// Home switch of `key` in each of its spaces.
pub fn home_switches(t: &Topology, key: &KeyAddress) -> Result<Vec<SwitchId>> {
    if key.spaces() > t.spaces() {
        return Err(Error::Dimension {
            expected: t.spaces(),
            got: key.spaces(),
        });
    }
    if t.switch_count() == 0 {
        return Err(Error::Parameter("topology has no switches".into()));
    }
    let coords = t.all_coords();
    Ok((0..key.spaces())
        .map(|j| home_switch_in_space(&coords, j, key.point()[j]))
        .collect())
}

impl Router {
    /// Greedy one-hop routing toward the key's point until no neighbor is
    /// strictly closer.
    pub fn key_route(&self, src: SwitchId, key: &KeyAddress, hop_budget: Option<usize>) -> Result<PathRecord> {
        self.check(src)?;
        let opts = RouteOptions {
            d_spaces: Some(key.spaces()),
            k_hops: 1,
            hop_budget,
        };
        let (d, budget) = self.resolve(&opts)?;
        Ok(self.walk(vec![src], Target::Point(key.point()), d, 1, budget))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::DeployParams;
    use proptest::prelude::*;

    fn c1(v: &[f64]) -> Vec<Coordinates> {
        v.iter().map(|x| Coordinates::from_values(&[*x]).unwrap()).collect()
    }

    #[test]
    fn home_examples() {
        let coords = c1(&[0.1, 0.4, 0.8]);
        assert_eq!(home_switch_in_space(&coords, 0, RingCoordinate::new(0.35)), SwitchId(1));
        assert_eq!(home_switch_in_space(&coords, 0, RingCoordinate::new(0.97)), SwitchId(0));
        assert_eq!(home_switch_in_space(&coords, 0, RingCoordinate::new(0.7)), SwitchId(2));
        // midpoint tie goes to the larger coordinate
        let coords = c1(&[0.2, 0.4]);
        assert_eq!(home_switch_in_space(&coords, 0, RingCoordinate::new(0.3)), SwitchId(1));
        let coords = c1(&[0.4, 0.2]);
        assert_eq!(home_switch_in_space(&coords, 0, RingCoordinate::new(0.3)), SwitchId(0));
    }

    #[test]
    fn key_hash_is_stable_and_space_dependent() {
        let a = key_hash(b"object-17", 1);
        assert_eq!(a, key_hash(b"object-17", 1));
        assert_ne!(a, key_hash(b"object-17", 2));
        assert!((0.0..1.0).contains(&a));
        let k = KeyAddress::new("object-17", 3).unwrap();
        assert_eq!(k.spaces(), 3);
        assert_eq!(k.point()[0].value(), a);
        assert!(KeyAddress::new("x", 0).is_err());
    }

    fn oracle_homes(t: &Topology, key: &KeyAddress) -> Vec<SwitchId> {
        // sort each ring and look at the two switches around the point
        (0..key.spaces())
            .map(|j| {
                let h = key.point()[j];
                let order = t.ring_order(j);
                let pos = order.partition_point(|s| t.coords(*s)[j].value() < h.value());
                let after = order[pos % order.len()];
                let before = order[(pos + order.len() - 1) % order.len()];
                let da = circular_distance(t.coords(after)[j], h);
                let db = circular_distance(t.coords(before)[j], h);
                if db < da {
                    before
                } else {
                    after
                }
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn key_route_ends_at_a_home(seed in 0u64..1000, d in 1usize..=4, n in 10usize..80) {
            let t = Topology::deploy_seeded(&DeployParams::new(n, 2 * n, 10), seed).unwrap();
            let r = Router::new(&t);
            let d = d.min(t.spaces());
            for k in 0..20 {
                let key = KeyAddress::new(format!("key-{seed}-{k}"), d).unwrap();
                let homes = home_switches(&t, &key).unwrap();
                prop_assert_eq!(&homes, &oracle_homes(&t, &key));
                for src in [0, n / 2, n - 1] {
                    let p = r.key_route(SwitchId(src), &key, None).unwrap();
                    prop_assert!(p.success);
                    prop_assert!(homes.contains(&p.destination()));
                }
            }
        }
    }
}
