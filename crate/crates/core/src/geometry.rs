//! Distance arithmetic on circular coordinate spaces.
//!
//! Every switch owns one [`RingCoordinate`] per virtual space. Distances are
//! measured along the shorter arc of the unit ring, and the routing metric
//! between two switches is the minimum of those per-space distances.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position on the unit ring, always in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RingCoordinate(f64);

impl RingCoordinate {
    /// Wraps `value` onto the ring by modulo-1 reduction.
    ///
    /// Panics on non-finite input; use [`RingCoordinate::try_new`] for
    /// untrusted values.
    pub fn new(value: f64) -> Self {
        Self::try_new(value).expect("ring coordinate must be finite")
    }

    pub fn try_new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Parameter(format!("non-finite coordinate {value}")));
        }
        let mut v = value.rem_euclid(1.0);
        // rem_euclid of a tiny negative number rounds up to exactly 1.0
        if v >= 1.0 {
            v = 0.0;
        }
        Ok(Self(v))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Clockwise arc length from `self` to `other`, in `[0, 1)`.
    #[inline]
    pub fn arc_to(self, other: RingCoordinate) -> f64 {
        let d = other.0 - self.0;
        if d >= 0.0 {
            d
        } else {
            d + 1.0
        }
    }
}

impl TryFrom<f64> for RingCoordinate {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&value) {
            return Err(Error::Parameter(format!("coordinate {value} outside [0, 1)")));
        }
        Ok(Self(value))
    }
}

impl From<RingCoordinate> for f64 {
    fn from(c: RingCoordinate) -> f64 {
        c.0
    }
}

impl fmt::Display for RingCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One ring coordinate per virtual space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coordinates(Vec<RingCoordinate>);

impl Coordinates {
    pub fn new(per_space: Vec<RingCoordinate>) -> Result<Self> {
        if per_space.is_empty() {
            return Err(Error::Parameter("coordinates need at least one space".into()));
        }
        Ok(Self(per_space))
    }

    /// Builds coordinates from raw reals, normalizing each into `[0, 1)`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let per_space = values
            .iter()
            .map(|&v| RingCoordinate::try_new(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(per_space)
    }

    /// Number of spaces `L`.
    #[inline]
    pub fn spaces(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[RingCoordinate] {
        &self.0
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.0).collect()
    }
}

impl Index<usize> for Coordinates {
    type Output = RingCoordinate;

    fn index(&self, space: usize) -> &RingCoordinate {
        &self.0[space]
    }
}

/// Circular distance: the shorter arc between `x` and `y`, in `[0, 0.5]`.
#[inline]
pub fn circular_distance(x: RingCoordinate, y: RingCoordinate) -> f64 {
    let d = (x.0 - y.0).abs();
    d.min(1.0 - d)
}

/// Minimum circular distance over all spaces.
pub fn mcd(a: &Coordinates, b: &Coordinates) -> Result<f64> {
    check_dims(a, b)?;
    Ok(mcd_prefix(a, b, a.spaces()))
}

/// Minimum circular distance over the first `d` spaces only.
pub fn d_mcd(a: &Coordinates, b: &Coordinates, d: usize) -> Result<f64> {
    check_dims(a, b)?;
    if d == 0 || d > a.spaces() {
        return Err(Error::Parameter(format!(
            "space count d={d} outside [1, {}]",
            a.spaces()
        )));
    }
    Ok(mcd_prefix(a, b, d))
}

/// Unchecked d-MCD for hot loops. Both operands must have at least `d` spaces.
#[inline]
pub(crate) fn mcd_prefix(a: &Coordinates, b: &Coordinates, d: usize) -> f64 {
    a.0[..d]
        .iter()
        .zip(&b.0[..d])
        .map(|(&x, &y)| circular_distance(x, y))
        .fold(f64::INFINITY, f64::min)
}

fn check_dims(a: &Coordinates, b: &Coordinates) -> Result<()> {
    if a.spaces() != b.spaces() {
        return Err(Error::Dimension {
            expected: a.spaces(),
            got: b.spaces(),
        });
    }
    Ok(())
}

/// Size of the control area of `x` in one space: half the arc back to its
/// counter-clockwise neighbor `left` plus half the arc forward to its
/// clockwise neighbor `right`.
///
/// Whenever both arcs are at most one half this is `½CD(x,left) + ½CD(x,right)`.
/// Measuring directed arcs keeps the areas a partition of the ring even when
/// a gap exceeds one half (as with two switches).
pub fn control_area_size(x: RingCoordinate, left: RingCoordinate, right: RingCoordinate) -> f64 {
    0.5 * left.arc_to(x) + 0.5 * x.arc_to(right)
}
