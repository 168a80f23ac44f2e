//! Planar primitives: points, circles, tolerance, and the structures built on
//! the smallest enclosing circle.

pub(crate) mod angles;
pub(crate) mod pattern;
mod sec;
pub(crate) mod similarity;

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

pub use angles::{
    angle_sequence, build_s_prime, co_radial, leader_angular_sequence, leader_angular_sequence_in,
    radiangular_distance, radiangular_priority, ray_groups, AngleSequence, LeaderAngularSequence,
    Provenance, RadiangularDistance, RayGroup, SPrimePoint,
};
pub use pattern::{
    circular_decomposition, pattern_sequences, CircularDecomposition, PatternSequence,
    PatternSequences, Triple,
};
pub use sec::{on_boundary, smallest_enclosing_circle};
pub use similarity::{is_similar, Similarity};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Point at distance `r` from the origin, `theta` radians counterclockwise from +x.
    pub fn polar(r: f64, theta: f64) -> Self {
        Point::new(r * theta.cos(), r * theta.sin())
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        norm_angle(self.y.atan2(self.x))
    }

    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn midpoint(self, other: Point) -> Self {
        Point::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic order on coordinates, used wherever a canonical order is needed.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn contains(&self, p: Point, slack: f64) -> bool {
        p.dist(self.center) <= self.radius + slack
    }
}

/// Comparison tolerance for geometric predicates.
///
/// Lengths are compared absolutely, so callers normalise scenes to `ρ = 1`
/// before asking questions whose answer should not depend on scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(usage(format!("tolerance must be a positive finite number, got {eps}")));
        }
        Ok(Tolerance { eps })
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.eps
    }

    pub fn same_point(&self, a: Point, b: Point) -> bool {
        a.dist(b) <= self.eps
    }

    /// Three-way comparison with an eps dead band.
    pub fn cmp(&self, a: f64, b: f64) -> std::cmp::Ordering {
        if self.eq(a, b) {
            std::cmp::Ordering::Equal
        } else {
            a.total_cmp(&b)
        }
    }
}

/// Rotation sense measured in some fixed coordinate system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chirality {
    Clockwise,
    Counterclockwise,
}

impl Chirality {
    pub fn flip(self) -> Self {
        match self {
            Chirality::Clockwise => Chirality::Counterclockwise,
            Chirality::Counterclockwise => Chirality::Clockwise,
        }
    }

    /// +1 for counterclockwise, -1 for clockwise.
    pub fn signum(self) -> f64 {
        match self {
            Chirality::Clockwise => -1.0,
            Chirality::Counterclockwise => 1.0,
        }
    }
}

pub fn norm_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Angle swept going from polar angle `from` to polar angle `to` in `sense`, in `[0, 2π)`.
pub fn sweep(from: f64, to: f64, sense: Chirality) -> f64 {
    match sense {
        Chirality::Counterclockwise => norm_angle(to - from),
        Chirality::Clockwise => norm_angle(from - to),
    }
}

/// True when `p` lies on segment `[a, b]` within `eps` of the segment.
pub fn on_segment(p: Point, a: Point, b: Point, eps: f64) -> bool {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= eps * eps {
        return p.dist(a) <= eps;
    }
    let t = (p - a).dot(ab) / len2;
    let len = len2.sqrt();
    if t * len < -eps || (t - 1.0) * len > eps {
        return false;
    }
    let proj = a + ab * t.clamp(0.0, 1.0);
    p.dist(proj) <= eps
}

/// True when `p` lies on segment `[a, b]` but is neither endpoint.
pub fn strictly_inside_segment(p: Point, a: Point, b: Point, eps: f64) -> bool {
    on_segment(p, a, b, eps) && p.dist(a) > eps && p.dist(b) > eps
}

pub(crate) fn check_finite(points: &[Point]) -> Result<()> {
    if points.iter().all(|p| p.is_finite()) {
        Ok(())
    } else {
        Err(usage("non-finite coordinate"))
    }
}
