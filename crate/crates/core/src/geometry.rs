//! Planar geometry used by the routing layer.
//!
//! Angles are never materialized; every angular decision goes through dot
//! and cross products so that boundary cases resolve the same way on every
//! platform.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::ops::{Add, Sub};

use thiserror::Error;

/// Cosine assigned to any pair involving a zero-length vector.
pub const ZERO_VECTOR_COSINE: f64 = FRAC_1_SQRT_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("lens distance must be non-negative and finite, got {0}")]
    NegativeDistance(f64),
    #[error("disc radius must be positive and finite, got {0}")]
    NonPositiveRadius(f64),
}

/// A point in the simulation plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Vector pointing from `self` to `other`.
    pub fn to(self, other: Position) -> Vec2 {
        other - self
    }

    pub fn offset(self, v: Vec2) -> Position {
        self + v
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3})", self.x, self.y)
    }
}

/// A displacement in meters. May be zero-length.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub dx: f64,
    pub dy: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { dx: 0.0, dy: 0.0 };

    pub const fn new(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    /// Unit vector at `angle` radians from the +x axis.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { dx: c, dy: s }
    }

    pub fn norm(self) -> f64 {
        self.dx.hypot(self.dy)
    }

    pub fn norm_squared(self) -> f64 {
        self.dx * self.dx + self.dy * self.dy
    }

    pub fn is_zero(self) -> bool {
        self.dx == 0.0 && self.dy == 0.0
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.dx * other.dx + self.dy * other.dy
    }

    /// z-component of the 3-D cross product; positive when `other` lies
    /// counter-clockwise of `self`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.dx * other.dy - self.dy * other.dx
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.dx * k, self.dy * k)
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self.scale(1.0 / n))
        } else {
            None
        }
    }

    /// Counter-clockwise rotation.
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.dx - s * self.dy, s * self.dx + c * self.dy)
    }
}

impl Sub for Position {
    type Output = Vec2;
    fn sub(self, rhs: Position) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add<Vec2> for Position {
    type Output = Position;
    fn add(self, rhs: Vec2) -> Position {
        Position::new(self.x + rhs.dx, self.y + rhs.dy)
    }
}

pub fn distance(a: Position, b: Position) -> f64 {
    (b - a).norm()
}

/// Cosine of the angle between `u` and `v`, clamped to `[-1, 1]`.
///
/// When either vector has zero length the result is exactly
/// [`ZERO_VECTOR_COSINE`]; a relay sitting on top of the deciding node then
/// scores zero in the utility function.
pub fn direction_cosine(u: Vec2, v: Vec2) -> f64 {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return ZERO_VECTOR_COSINE;
    }
    (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0)
}

/// Area shared by two discs of radius `radius` whose centers are `d` apart.
pub fn lens_area(d: f64, radius: f64) -> Result<f64, GeometryError> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(GeometryError::NegativeDistance(d));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    if d >= 2.0 * radius {
        return Ok(0.0);
    }
    let r2 = radius * radius;
    let half_chord = (4.0 * r2 - d * d).max(0.0).sqrt();
    Ok(2.0 * r2 * (d / (2.0 * radius)).acos() - 0.5 * d * half_chord)
}

/// Fraction of one disc covered by the lens at separation `d`.
pub fn lens_fraction(d: f64, radius: f64) -> Result<f64, GeometryError> {
    Ok(lens_area(d, radius)? / (PI * radius * radius))
}

/// Which forward quarter-sector a neighbor falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    /// Counter-clockwise of the axis (around the +π/4 bisector).
    A,
    /// Clockwise of the axis (around the −π/4 bisector).
    B,
    /// Backward half-plane, toward the anchor.
    Outside,
}

/// The two forward quarter-sectors seen from a relay that is spreading a
/// copy away from its anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorFrame {
    pub apex: Position,
    pub axis: Vec2,
    pub bisector_a: Vec2,
    pub bisector_b: Vec2,
    pub radius: f64,
}

impl SectorFrame {
    /// Frame at `apex` with axis along `direction`. A zero direction falls
    /// back to the +x axis.
    pub fn new(apex: Position, direction: Vec2, radius: f64) -> Self {
        let axis = direction.normalized().unwrap_or(Vec2::new(1.0, 0.0));
        let quarter = PI / 4.0;
        Self {
            apex,
            axis,
            bisector_a: axis.rotated(quarter),
            bisector_b: axis.rotated(-quarter),
            radius,
        }
    }

    /// Frame whose axis points from `anchor` through `apex`.
    pub fn away_from(anchor: Position, apex: Position, radius: f64) -> Self {
        Self::new(apex, anchor.to(apex), radius)
    }

    pub fn bisector(&self, sector: Sector) -> Option<Vec2> {
        match sector {
            Sector::A => Some(self.bisector_a),
            Sector::B => Some(self.bisector_b),
            Sector::Outside => None,
        }
    }
}

/// Classify `candidate` relative to `frame`.
///
/// The forward half-plane (non-negative projection on the axis) splits at
/// the axis: counter-clockwise side and the axis itself go to `A`, the
/// clockwise side to `B`. A co-located candidate goes to `A`.
pub fn forward_sector_of(frame: &SectorFrame, candidate: Position) -> Sector {
    let v = frame.apex.to(candidate);
    if v.is_zero() {
        return Sector::A;
    }
    if frame.axis.dot(v) < 0.0 {
        Sector::Outside
    } else if frame.axis.cross(v) >= 0.0 {
        Sector::A
    } else {
        Sector::B
    }
}
