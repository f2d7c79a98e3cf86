//! Integer-lattice boxes in R³, their dilations and intersections, and the
//! monotone side-length profiles that define a Zygmund family.
//!
//! All coordinates live on a global integer lattice, so every volume below is
//! an exact integer. Boxes are closed, but two boxes only "overlap" when their
//! interiors do: a shared face has measure zero and never creates depth.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible absolute coordinate after every lattice operation.
pub const COORD_LIMIT: i64 = 1 << 40;

/// Exact Lebesgue measure in lattice units.
pub type Measure = u128;

/// The dilation factor used by the covering argument.
pub const CANONICAL_DILATION: u32 = 3;

/// Serialized as its 1-based number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Axis from its 1-based number, as used on the command line.
    pub fn from_number(n: u8) -> Option<Axis> {
        match n {
            1 => Some(Axis::X),
            2 => Some(Axis::Y),
            3 => Some(Axis::Z),
            _ => None,
        }
    }

    /// The two remaining axes, in increasing order.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::X, Axis::Z),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }
}

impl From<Axis> for u8 {
    fn from(a: Axis) -> u8 {
        a.index() as u8 + 1
    }
}

impl TryFrom<u8> for Axis {
    type Error = String;

    fn try_from(n: u8) -> std::result::Result<Axis, String> {
        Axis::from_number(n).ok_or_else(|| format!("axis must be 1, 2 or 3, got {n}"))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

fn check_coord(v: i128) -> Result<i64> {
    if v.abs() > COORD_LIMIT as i128 {
        return Err(Error::CoordinateOverflow { value: v });
    }
    Ok(v as i64)
}

/// A nondegenerate closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Interval {
    lo: i64,
    hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        check_coord(lo as i128)?;
        check_coord(hi as i128)?;
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Always positive.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> i64 {
        self.hi - self.lo
    }

    /// Twice the midpoint; an exact integer for every interval.
    pub fn doubled_center(&self) -> i64 {
        self.lo + self.hi
    }

    /// Common part with positive length, if any.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Same center, length multiplied by an odd `factor`.
    ///
    /// With `h = (factor - 1) / 2` the endpoints are `[a - h(b - a), b + h(b - a)]`,
    /// which is `[2a - b, 2b - a]` for `factor = 3`.
    pub fn dilate(&self, factor: u32) -> Result<Interval> {
        check_factor(factor)?;
        let half = (factor as i128 - 1) / 2;
        let len = self.len() as i128;
        let lo = check_coord(self.lo as i128 - half * len)?;
        let hi = check_coord(self.hi as i128 + half * len)?;
        Ok(Interval { lo, hi })
    }
}

impl TryFrom<[i64; 2]> for Interval {
    type Error = Error;

    fn try_from([lo, hi]: [i64; 2]) -> Result<Self> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for [i64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

fn check_factor(factor: u32) -> Result<()> {
    if factor == 0 || factor.is_multiple_of(2) {
        return Err(Error::InvalidDilation(factor));
    }
    Ok(())
}

/// Closed axis-parallel box with integer endpoints and positive volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Box3 {
    pub x: Interval,
    pub y: Interval,
    pub z: Interval,
}

impl Box3 {
    pub fn new(x: Interval, y: Interval, z: Interval) -> Self {
        Box3 { x, y, z }
    }

    /// Builds a box from `[lo, hi]` pairs per axis.
    pub fn from_bounds(x: [i64; 2], y: [i64; 2], z: [i64; 2]) -> Result<Self> {
        Ok(Box3 {
            x: Interval::try_from(x)?,
            y: Interval::try_from(y)?,
            z: Interval::try_from(z)?,
        })
    }

    /// Box with the given side lengths and lower corner.
    pub fn with_sides(corner: [i64; 3], sides: [i64; 3]) -> Result<Self> {
        Box3::from_bounds(
            [corner[0], corner[0] + sides[0]],
            [corner[1], corner[1] + sides[1]],
            [corner[2], corner[2] + sides[2]],
        )
    }

    /// The cube `[lo, hi]³`.
    pub fn cube(lo: i64, hi: i64) -> Result<Self> {
        Box3::from_bounds([lo, hi], [lo, hi], [lo, hi])
    }

    pub fn axis(&self, axis: Axis) -> Interval {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn side(&self, axis: Axis) -> i64 {
        self.axis(axis).len()
    }

    pub fn sides(&self) -> [i64; 3] {
        [self.x.len(), self.y.len(), self.z.len()]
    }

    pub fn volume(&self) -> Measure {
        self.sides().iter().map(|&s| s as Measure).product()
    }

    pub fn dilate(&self, factor: u32) -> Result<Box3> {
        Ok(Box3 {
            x: self.x.dilate(factor)?,
            y: self.y.dilate(factor)?,
            z: self.z.dilate(factor)?,
        })
    }

    /// Closed intersection when the interiors overlap, `None` otherwise.
    pub fn intersect(&self, other: &Box3) -> Option<Box3> {
        Some(Box3 {
            x: self.x.intersect(&other.x)?,
            y: self.y.intersect(&other.y)?,
            z: self.z.intersect(&other.z)?,
        })
    }

    pub fn contains(&self, other: &Box3) -> bool {
        self.x.contains(&other.x) && self.y.contains(&other.y) && self.z.contains(&other.z)
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &Box3) -> Box3 {
        let join = |a: Interval, b: Interval| Interval {
            lo: a.lo.min(b.lo),
            hi: a.hi.max(b.hi),
        };
        Box3 {
            x: join(self.x, other.x),
            y: join(self.y, other.y),
            z: join(self.z, other.z),
        }
    }
}

impl fmt::Display for Box3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}]x[{},{}]x[{},{}]",
            self.x.lo, self.x.hi, self.y.lo, self.y.hi, self.z.lo, self.z.hi
        )
    }
}

pub fn dilate(b: &Box3, factor: u32) -> Result<Box3> {
    b.dilate(factor)
}

pub fn intersect(a: &Box3, b: &Box3) -> Option<Box3> {
    a.intersect(b)
}

/// A tabulated side-length profile `φ(x, y)`.
///
/// The profile is only defined on its sample points; there is no interpolation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZygmundProfile {
    table: BTreeMap<(i64, i64), i64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct ProfileSample {
    x: i64,
    y: i64,
    phi: i64,
}

impl ZygmundProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(samples: impl IntoIterator<Item = ((i64, i64), i64)>) -> Self {
        ZygmundProfile {
            table: samples.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, x: i64, y: i64, phi: i64) {
        self.table.insert((x, y), phi);
    }

    pub fn phi(&self, x: i64, y: i64) -> Result<i64> {
        self.table
            .get(&(x, y))
            .copied()
            .ok_or(Error::OffTable { x, y })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = ((i64, i64), i64)> + '_ {
        self.table.iter().map(|(&k, &v)| (k, v))
    }

    /// Every sample pair `(p, q)` with `p ≤ q` componentwise but `φ(p) > φ(q)`.
    pub fn monotonicity_violations(&self) -> Vec<((i64, i64), (i64, i64))> {
        let mut out = Vec::new();
        for (&p, &fp) in &self.table {
            for (&q, &fq) in &self.table {
                if p != q && p.0 <= q.0 && p.1 <= q.1 && fp > fq {
                    out.push((p, q));
                }
            }
        }
        out
    }
}

impl Serialize for ZygmundProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<ProfileSample> = self
            .samples()
            .map(|((x, y), phi)| ProfileSample { x, y, phi })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZygmundProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<ProfileSample>::deserialize(d)?;
        Ok(ZygmundProfile::from_samples(
            rows.into_iter().map(|r| ((r.x, r.y), r.phi)),
        ))
    }
}

/// An enlisted sequence of boxes, optionally claiming membership in `B_φ`.
///
/// The order of `boxes` is the enlistment order and is significant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxFamily {
    pub profile: Option<ZygmundProfile>,
    pub boxes: Vec<Box3>,
}

impl BoxFamily {
    pub fn new(boxes: Vec<Box3>) -> Self {
        BoxFamily {
            profile: None,
            boxes,
        }
    }

    pub fn with_profile(boxes: Vec<Box3>, profile: ZygmundProfile) -> Self {
        BoxFamily {
            profile: Some(profile),
            boxes,
        }
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Rejects families whose canonical dilation would leave the lattice bound.
    pub fn check_bounds(&self) -> Result<()> {
        for (index, b) in self.boxes.iter().enumerate() {
            b.dilate(CANONICAL_DILATION)
                .map_err(|_| Error::FamilyOverflow { index })?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let family: BoxFamily = serde_json::from_str(text)?;
        family.check_bounds()?;
        Ok(family)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideViolation {
    pub index: usize,
    pub sides: [i64; 3],
    /// `None` when the profile has no sample at `(sides[0], sides[1])`.
    pub expected_z: Option<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZygmundReport {
    pub profile_missing: bool,
    pub side_violations: Vec<SideViolation>,
    pub monotonicity_violations: Vec<((i64, i64), (i64, i64))>,
}

impl ZygmundReport {
    pub fn is_valid(&self) -> bool {
        !self.profile_missing
            && self.side_violations.is_empty()
            && self.monotonicity_violations.is_empty()
    }
}

/// Checks that every box has `len(z) = φ(len(x), len(y))` and that the profile is monotone.
pub fn validate_zygmund(family: &BoxFamily) -> ZygmundReport {
    let Some(profile) = &family.profile else {
        return ZygmundReport {
            profile_missing: true,
            ..Default::default()
        };
    };
    let side_violations = family
        .boxes
        .iter()
        .enumerate()
        .filter_map(|(index, b)| {
            let sides = b.sides();
            let expected_z = profile.phi(sides[0], sides[1]).ok();
            (expected_z != Some(sides[2])).then_some(SideViolation {
                index,
                sides,
                expected_z,
            })
        })
        .collect();
    ZygmundReport {
        profile_missing: false,
        side_violations,
        monotonicity_violations: profile.monotonicity_violations(),
    }
}
