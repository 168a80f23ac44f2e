use super::{check_finite, Circle, Point, Tolerance};
use crate::error::{usage, Result};

// Containment slack for the incremental construction; relative so that it
// behaves the same at any scale.
const REL_SLACK: f64 = 1e-12;

/// Smallest circle containing every point.
///
/// Incremental minidisk construction over the points in input order, so the
/// result is a deterministic function of the list.
pub fn smallest_enclosing_circle(points: &[Point], _tol: Tolerance) -> Result<Circle> {
    if points.is_empty() {
        return Err(usage("smallest enclosing circle of an empty point set"));
    }
    check_finite(points)?;
    let mut c = Circle::new(points[0], 0.0);
    for i in 1..points.len() {
        if !covers(&c, points[i]) {
            c = with_one(&points[..i], points[i]);
        }
    }
    Ok(c)
}

pub fn on_boundary(p: Point, c: &Circle, tol: Tolerance) -> bool {
    tol.eq(p.dist(c.center), c.radius)
}

fn covers(c: &Circle, p: Point) -> bool {
    p.dist(c.center) <= c.radius * (1.0 + REL_SLACK) + f64::MIN_POSITIVE
}

// Smallest circle over `points` with `p` on its boundary.
fn with_one(points: &[Point], p: Point) -> Circle {
    let mut c = Circle::new(p, 0.0);
    for i in 0..points.len() {
        let q = points[i];
        if !covers(&c, q) {
            c = if c.radius == 0.0 {
                diameter(p, q)
            } else {
                with_two(&points[..i], p, q)
            };
        }
    }
    c
}

// Smallest circle over `points` with `p` and `q` on its boundary.
fn with_two(points: &[Point], p: Point, q: Point) -> Circle {
    let base = diameter(p, q);
    let pq = q - p;
    let mut left: Option<Circle> = None;
    let mut right: Option<Circle> = None;
    for &r in points {
        if covers(&base, r) {
            continue;
        }
        let side = pq.cross(r - p);
        let Some(c) = circumcircle(p, q, r) else {
            continue;
        };
        let offset = pq.cross(c.center - p);
        if side > 0.0 {
            if left.is_none_or(|l| offset > pq.cross(l.center - p)) {
                left = Some(c);
            }
        } else if side < 0.0 && right.is_none_or(|rc| offset < pq.cross(rc.center - p)) {
            right = Some(c);
        }
    }
    match (left, right) {
        (None, None) => base,
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (Some(l), Some(r)) => {
            if l.radius <= r.radius {
                l
            } else {
                r
            }
        }
    }
}

fn diameter(a: Point, b: Point) -> Circle {
    let c = a.midpoint(b);
    Circle::new(c, c.dist(a).max(c.dist(b)))
}

pub(crate) fn circumcircle(a: Point, b: Point, c: Point) -> Option<Circle> {
    // Work relative to the bounding-box center for accuracy.
    let ox = (a.x.min(b.x).min(c.x) + a.x.max(b.x).max(c.x)) / 2.0;
    let oy = (a.y.min(b.y).min(c.y) + a.y.max(b.y).max(c.y)) / 2.0;
    let (ax, ay) = (a.x - ox, a.y - oy);
    let (bx, by) = (b.x - ox, b.y - oy);
    let (cx, cy) = (c.x - ox, c.y - oy);
    let d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0;
    if d == 0.0 {
        return None;
    }
    let (a2, b2, c2) = (ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy);
    let x = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let y = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = Point::new(ox + x, oy + y);
    let r = center.dist(a).max(center.dist(b)).max(center.dist(c));
    Some(Circle::new(center, r))
}
