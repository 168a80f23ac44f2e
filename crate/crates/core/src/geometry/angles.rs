use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{on_boundary, smallest_enclosing_circle, sweep, Chirality, Circle, Point, Tolerance};
use crate::error::{usage, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Robot,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SPrimePoint {
    pub point: Point,
    pub provenance: Provenance,
    /// Index into the robot or pattern list the point came from.
    pub source: usize,
}

/// Maximal set of points on one ray from the center, innermost first.
#[derive(Clone, Debug)]
pub struct RayGroup {
    pub angle: f64,
    pub members: Vec<SPrimePoint>,
}

impl RayGroup {
    /// Representative: outermost robot if any, else outermost pattern point.
    pub fn representative(&self) -> SPrimePoint {
        let pick = |prov| self.members.iter().rev().find(|m| m.provenance == prov).copied();
        pick(Provenance::Robot)
            .or_else(|| pick(Provenance::Pattern))
            .expect("ray group is never empty")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSequence {
    pub points: Vec<Point>,
    pub angles: Vec<f64>,
    pub direction: Chirality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeaderAngularSequence {
    /// Sequence starting at `inner_point`, so `angles[theta1_index]` is θ_1.
    pub base: AngleSequence,
    pub theta1_index: usize,
    pub inner_point: Point,
    pub boundary_point: Point,
    /// Frame rotation sense that the sequence designates as clockwise.
    pub orientation: Chirality,
}

impl LeaderAngularSequence {
    pub fn theta1(&self) -> f64 {
        self.base.angles[self.theta1_index]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiangularDistance {
    pub angle: f64,
    pub length: f64,
}

/// A point within eps of `center` counts as co-radial with everything.
pub fn co_radial(a: Point, b: Point, center: Point, tol: Tolerance) -> bool {
    let (va, vb) = (a - center, b - center);
    if va.norm() <= tol.eps || vb.norm() <= tol.eps {
        return true;
    }
    same_ray(va, vb, tol)
}

/// Nonzero vectors `a` and `b` point the same way: the shorter lies within
/// `eps` of the longer's ray. Measured as a distance so that points close to
/// the center, whose bearings are ill-conditioned, are judged alike by every observer.
fn same_ray(a: Point, b: Point, tol: Tolerance) -> bool {
    a.dot(b) > 0.0 && a.cross(b).abs() <= tol.eps * a.norm().max(b.norm())
}

/// Groups the non-center points into rays about `center`, sorted by polar angle.
pub fn ray_groups(points: &[SPrimePoint], center: Point, tol: Tolerance) -> Vec<RayGroup> {
    let mut polar: Vec<(f64, SPrimePoint)> = points
        .iter()
        .filter(|p| p.point.dist(center) > tol.eps)
        .map(|p| ((p.point - center).angle(), *p))
        .collect();
    polar.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut groups: Vec<RayGroup> = Vec::new();
    let v = |p: &SPrimePoint| p.point - center;
    for (ang, p) in polar {
        match groups.last_mut() {
            Some(g) if g.members.iter().any(|m| same_ray(v(m), v(&p), tol)) => g.members.push(p),
            _ => groups.push(RayGroup { angle: ang, members: vec![p] }),
        }
    }
    if groups.len() > 1 {
        let (first, last) = (&groups[0], &groups[groups.len() - 1]);
        let wraps = first.members.iter().any(|a| last.members.iter().any(|b| same_ray(v(a), v(b), tol)));
        if wraps {
            let tail = groups.pop().expect("len > 1");
            groups[0].members.extend(tail.members);
        }
    }
    for g in &mut groups {
        g.members
            .sort_by(|a, b| a.point.dist(center).total_cmp(&b.point.dist(center)));
    }
    groups
}

pub(crate) fn tagged(robots: &[Point], pattern: Option<&[Point]>) -> Vec<SPrimePoint> {
    let mut v: Vec<SPrimePoint> = robots
        .iter()
        .enumerate()
        .map(|(i, &p)| SPrimePoint { point: p, provenance: Provenance::Robot, source: i })
        .collect();
    if let Some(pat) = pattern {
        v.extend(pat.iter().enumerate().map(|(i, &p)| SPrimePoint {
            point: p,
            provenance: Provenance::Pattern,
            source: i,
        }));
    }
    v
}

/// One representative per ray, counterclockwise from the smallest polar angle.
pub(crate) fn s_prime_rays(
    robots: &[Point],
    pattern: Option<&[Point]>,
    center: Point,
    tol: Tolerance,
) -> Vec<SPrimePoint> {
    ray_groups(&tagged(robots, pattern), center, tol)
        .iter()
        .map(RayGroup::representative)
        .collect()
}

pub fn build_s_prime(
    robots: &[Point],
    pattern: Option<&[Point]>,
    sec: &Circle,
    tol: Tolerance,
) -> Result<Vec<SPrimePoint>> {
    let s = s_prime_rays(robots, pattern, sec.center, tol);
    if s.len() < 3 {
        return Err(Error::SequenceUndefined);
    }
    Ok(s)
}

/// Consecutive central angles of a ray-distinct point list starting at `start`.
pub fn angle_sequence(
    s_prime: &[Point],
    center: Point,
    start: Point,
    direction: Chirality,
) -> Result<AngleSequence> {
    if s_prime.len() < 3 {
        return Err(usage("angle sequence needs more than two points"));
    }
    let mut sorted: Vec<(f64, Point)> =
        s_prime.iter().map(|&p| ((p - center).angle(), p)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if direction == Chirality::Clockwise {
        sorted.reverse();
    }
    let scale = s_prime.iter().map(|p| p.dist(center)).fold(1.0, f64::max);
    let (si, _) = sorted
        .iter()
        .enumerate()
        .map(|(i, (_, p))| (i, p.dist(start)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .filter(|(_, d)| *d <= 1e-9 * scale)
        .ok_or_else(|| usage("start point is not in the sequence"))?;
    let l = sorted.len();
    let points: Vec<Point> = (0..l).map(|k| sorted[(si + k) % l].1).collect();
    let angles: Vec<f64> = (0..l)
        .map(|k| {
            let a = (points[k] - center).angle();
            let b = (points[(k + 1) % l] - center).angle();
            sweep(a, b, direction)
        })
        .collect();
    if angles.iter().any(|&a| a <= 0.0) {
        return Err(usage("angle sequence points must not be co-radial"));
    }
    Ok(AngleSequence { points, angles, direction })
}

pub fn leader_angular_sequence(
    robots: &[Point],
    pattern: Option<&[Point]>,
    tol: Tolerance,
) -> Option<LeaderAngularSequence> {
    let sec = smallest_enclosing_circle(robots, tol).ok()?;
    leader_angular_sequence_in(robots, pattern, &sec, tol)
}

/// Leader angular sequence against an explicitly given SEC.
pub fn leader_angular_sequence_in(
    robots: &[Point],
    pattern: Option<&[Point]>,
    sec: &Circle,
    tol: Tolerance,
) -> Option<LeaderAngularSequence> {
    let s = build_s_prime(robots, pattern, sec, tol).ok()?;
    let o = sec.center;
    let l = s.len();
    let gaps: Vec<f64> = (0..l)
        .map(|i| {
            sweep(
                (s[i].point - o).angle(),
                (s[(i + 1) % l].point - o).angle(),
                Chirality::Counterclockwise,
            )
        })
        .collect();
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &b| gaps[a].total_cmp(&gaps[b]));
    if gaps[order[1]] - gaps[order[0]] <= tol.eps {
        return None;
    }
    let (a, b) = (s[order[0]], s[(order[0] + 1) % l]);
    if a.provenance != Provenance::Robot || b.provenance != Provenance::Robot {
        return None;
    }
    let interior = |p: Point| p.dist(o) < sec.radius - tol.eps;
    let (inner, boundary, orientation) = if interior(a.point) && on_boundary(b.point, sec, tol) {
        (a.point, b.point, Chirality::Counterclockwise)
    } else if interior(b.point) && on_boundary(a.point, sec, tol) {
        (b.point, a.point, Chirality::Clockwise)
    } else {
        return None;
    };
    let pts: Vec<Point> = s.iter().map(|p| p.point).collect();
    let base = angle_sequence(&pts, o, inner, orientation).ok()?;
    Some(LeaderAngularSequence {
        base,
        theta1_index: 0,
        inner_point: inner,
        boundary_point: boundary,
        orientation,
    })
}

/// Radiangular distance from `a` to `b`, angles swept in `orientation`.
pub fn radiangular_distance(
    a: Point,
    b: Point,
    center: Point,
    orientation: Chirality,
    tol: Tolerance,
) -> RadiangularDistance {
    if co_radial(a, b, center, tol) {
        return RadiangularDistance { angle: 0.0, length: a.dist(b) };
    }
    let theta = sweep((a - center).angle(), (b - center).angle(), orientation);
    RadiangularDistance { angle: theta, length: a.dist(center) + b.dist(center) }
}

/// Walker priority between two radiangular distances; `Less` means `x` goes first.
pub fn radiangular_priority(
    x: &RadiangularDistance,
    y: &RadiangularDistance,
    tol: Tolerance,
) -> Ordering {
    match tol.cmp(x.angle, y.angle) {
        Ordering::Equal if x.angle <= tol.eps => tol.cmp(x.length, y.length),
        Ordering::Equal => tol.cmp(y.length, x.length),
        o => o,
    }
}
