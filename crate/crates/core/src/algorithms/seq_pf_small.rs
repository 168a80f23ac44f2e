use std::cmp::Ordering;

use super::seq_pf::separate;
use super::{Branch, Decision, Stage};
use crate::error::{usage, Error, Result};
use crate::geometry::{is_similar, strictly_inside_segment, Point, Tolerance};
use crate::model::Snapshot;

/// Sum of distances between leftover robots and leftover pattern points, best pairing.
pub fn distance_deviation(q_rest: &[Point], p_rest: &[Point]) -> Result<f64> {
    if q_rest.len() != p_rest.len() {
        return Err(usage("distance deviation needs equally sized point lists"));
    }
    match q_rest.len() {
        1 => Ok(q_rest[0].dist(p_rest[0])),
        2 => {
            let straight = p_rest[0].dist(q_rest[0]) + p_rest[1].dist(q_rest[1]);
            let crossed = p_rest[1].dist(q_rest[0]) + p_rest[0].dist(q_rest[1]);
            Ok(straight.min(crossed))
        }
        n => Err(usage(format!("distance deviation is defined for 1 or 2 points, got {n}"))),
    }
}

/// All pairs at the maximum distance, within a tolerance relative to that distance.
fn max_pairs(points: &[Point], tol: Tolerance) -> (f64, Vec<(usize, usize)>) {
    let mut d = 0.0f64;
    for i in 0..points.len() {
        for j in 0..i {
            d = d.max(points[i].dist(points[j]));
        }
    }
    let slack = tol.eps * d.max(1.0);
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].dist(points[j]) >= d - slack {
                pairs.push((i, j));
            }
        }
    }
    (d, pairs)
}

/// Similarity sending `a` to `qa` and `b` to `qb`, optionally mirroring first.
fn two_point_map(a: Point, b: Point, qa: Point, qb: Point, reflect: bool) -> impl Fn(Point) -> Point {
    let m = move |p: Point| if reflect { Point::new(p.x, -p.y) } else { p };
    let (ma, mb) = (m(a), m(b));
    let scale = qa.dist(qb) / ma.dist(mb);
    let rot = (qb - qa).angle() - (mb - ma).angle();
    move |p: Point| qa + (m(p) - ma).rotate(rot) * scale
}

fn lex_points(a: &[Point], b: &[Point], tol: Tolerance) -> Ordering {
    for (p, q) in a.iter().zip(b) {
        let o = tol.cmp(p.x, q.x).then(tol.cmp(p.y, q.y));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// The pattern-formation program for patterns of two to four points.
#[derive(Clone, Debug)]
pub struct SeqPfSmall {
    pattern: Vec<Point>,
    tol: Tolerance,
}

impl SeqPfSmall {
    pub fn new(pattern: &[Point], tol: Tolerance) -> Result<Self> {
        if !(2..=4).contains(&pattern.len()) {
            return Err(usage(format!("seq-pf-small needs 2 to 4 pattern points, got {}", pattern.len())));
        }
        for i in 0..pattern.len() {
            for j in 0..i {
                if pattern[i].dist(pattern[j]) <= tol.eps {
                    return Err(Error::Model(format!("pattern points {j} and {i} coincide")));
                }
            }
        }
        Ok(SeqPfSmall { pattern: pattern.to_vec(), tol })
    }

    fn k(&self) -> usize {
        self.pattern.len()
    }

    /// Overlap of minimal distance deviation, as placed pattern points.
    fn best_overlap(&self, q: &[Point], q1: usize, q2: usize) -> Vec<Point> {
        let tol = self.tol;
        let rest: Vec<Point> =
            (0..q.len()).filter(|&i| i != q1 && i != q2).map(|i| q[i]).collect();
        let (_, ppairs) = max_pairs(&self.pattern, tol);
        let mut best: Option<(f64, Vec<Point>)> = None;
        for &(i, j) in &ppairs {
            for (a, b) in [(i, j), (j, i)] {
                for reflect in [false, true] {
                    let f = two_point_map(self.pattern[a], self.pattern[b], q[q1], q[q2], reflect);
                    let placed: Vec<Point> = self.pattern.iter().map(|&p| f(p)).collect();
                    let p_rest: Vec<Point> = (0..placed.len())
                        .filter(|&m| m != a && m != b)
                        .map(|m| placed[m])
                        .collect();
                    let dev = if rest.is_empty() {
                        0.0
                    } else {
                        distance_deviation(&rest, &p_rest).unwrap_or(f64::INFINITY)
                    };
                    let better = match &best {
                        None => true,
                        Some((bd, bp)) => match tol.cmp(dev, *bd) {
                            Ordering::Less => true,
                            Ordering::Equal => lex_points(&placed, bp, tol) == Ordering::Less,
                            Ordering::Greater => false,
                        },
                    };
                    if better {
                        best = Some((dev, placed));
                    }
                }
            }
        }
        best.map(|b| b.1).unwrap_or_default()
    }

    pub fn decide(&self, snap: &Snapshot) -> Decision {
        let tol = self.tol;
        let q = &snap.points;
        let me = snap.self_index;
        if q.len() < self.k() {
            return Decision::to(separate(snap), Branch::Separate);
        }
        let (d, pairs) = max_pairs(q, tol);
        let eps = tol.eps * d.max(1.0);
        if q.len() == self.k() && is_similar(q, &self.pattern, tol) {
            return Decision::stay(snap, Branch::Formed);
        }
        if pairs.len() != 1 {
            if !pairs.iter().any(|&(a, b)| a == me || b == me) {
                return Decision::stay(snap, Branch::SmallStay);
            }
            let here = q[me];
            let far = (0..q.len())
                .filter(|&i| i != me)
                .max_by(|&a, &b| {
                    here.dist(q[a]).total_cmp(&here.dist(q[b])).then(q[b].lex_cmp(&q[a]))
                })
                .expect("at least two points");
            let away = here - q[far];
            return Decision::to(here + away * (1.0 / away.norm()), Branch::EnlargeMaximum);
        }
        let (q1, q2) = pairs[0];
        if me == q1 || me == q2 {
            return Decision::stay(snap, Branch::SmallStay);
        }
        let here = q[me];
        let free = |to: Point| {
            !q.iter().enumerate().any(|(i, &p)| i != me && strictly_inside_segment(p, here, to, eps))
        };
        if q.len() > self.k() {
            let target = match here.dist(q[q1]).total_cmp(&here.dist(q[q2])) {
                Ordering::Less => q[q1],
                Ordering::Greater => q[q2],
                Ordering::Equal => std::cmp::min_by(q[q1], q[q2], |a, b| a.lex_cmp(b)),
            };
            return if free(target) {
                Decision::to(target, Branch::ApproachEndpoint)
            } else {
                Decision::stay(snap, Branch::SmallStay)
            };
        }
        let placed = self.best_overlap(q, q1, q2);
        let on_pattern = |p: Point| placed.iter().any(|x| x.dist(p) <= eps);
        let loose: Vec<usize> = (0..q.len()).filter(|&i| !on_pattern(q[i])).collect();
        let mut mine: Vec<Point> = placed
            .iter()
            .copied()
            .filter(|&p| !q.iter().any(|x| x.dist(p) <= eps))
            .filter(|&p| {
                loose
                    .iter()
                    .copied()
                    .min_by(|&a, &b| q[a].dist(p).total_cmp(&q[b].dist(p)).then(q[a].lex_cmp(&q[b])))
                    == Some(me)
            })
            .collect();
        mine.sort_by(|a, b| here.dist(*a).total_cmp(&here.dist(*b)).then(a.lex_cmp(b)));
        match mine.first() {
            Some(&p) if free(p) => Decision::to(p, Branch::PlaceSmall),
            _ => Decision::stay(snap, Branch::SmallStay),
        }
    }

    pub fn stage(&self, q: &[Point]) -> Stage {
        if q.len() < self.k() {
            return Stage::Initialization;
        }
        if q.len() == self.k() && is_similar(q, &self.pattern, self.tol) {
            return Stage::Formed;
        }
        let (_, pairs) = max_pairs(q, self.tol);
        if pairs.len() != 1 {
            Stage::UniqueMaximum
        } else if q.len() > self.k() {
            Stage::Contraction
        } else {
            Stage::Finalization
        }
    }

    /// The unique maximum pair of `q` and its length, if there is one.
    pub fn unique_max_pair(&self, q: &[Point]) -> Option<(Point, Point, f64)> {
        let (d, pairs) = max_pairs(q, self.tol);
        (pairs.len() == 1).then(|| (q[pairs[0].0], q[pairs[0].1], d))
    }
}

pub fn seq_pf_small(snap: &Snapshot, pattern: &[Point], tol: Tolerance) -> Result<Point> {
    Ok(SeqPfSmall::new(pattern, tol)?.decide(snap).destination)
}
