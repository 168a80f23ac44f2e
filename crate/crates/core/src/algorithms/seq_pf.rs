use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Branch, Decision, Scene, Stage};
use crate::error::{usage, Error, Result};
use crate::geometry::angles::s_prime_rays;
use crate::geometry::pattern::{compare_sequences, decompose_about};
use crate::geometry::{
    co_radial, is_similar, leader_angular_sequence_in, on_segment, pattern_sequences,
    radiangular_distance, radiangular_priority, smallest_enclosing_circle, strictly_inside_segment,
    sweep, Chirality, Circle, LeaderAngularSequence, PatternSequences, Point, Similarity,
    Tolerance, Triple,
};
use crate::model::Snapshot;

const UNIT: Circle = Circle { center: Point::ORIGIN, radius: 1.0 };

/// A pattern normalised to the unit SEC at the origin, with its sequences.
#[derive(Clone, Debug)]
pub struct PatternModel {
    pub points: Vec<Point>,
    pub sequences: PatternSequences,
    /// First SEC-boundary point and direction of every sequence equal to the minimum.
    pub anchors: Vec<(usize, Chirality)>,
}

impl PatternModel {
    pub fn new(pattern: &[Point], tol: Tolerance) -> Result<Self> {
        if pattern.len() < 3 {
            return Err(usage("pattern model needs at least three points"));
        }
        let sec = smallest_enclosing_circle(pattern, tol)?;
        if sec.radius <= 0.0 {
            return Err(Error::Model("pattern points must be distinct".into()));
        }
        let points: Vec<Point> =
            pattern.iter().map(|&p| (p - sec.center) * (1.0 / sec.radius)).collect();
        for i in 0..points.len() {
            for j in 0..i {
                if points[i].dist(points[j]) <= tol.eps {
                    return Err(Error::Model(format!("pattern points {j} and {i} coincide")));
                }
            }
        }
        let sequences = pattern_sequences(&points, tol)?;
        let mut anchors: Vec<(usize, Chirality)> = Vec::new();
        for s in sequences.achieving_sequences() {
            let a = *s
                .order
                .iter()
                .find(|&&i| points[i].norm() >= 1.0 - tol.eps)
                .expect("some pattern point lies on its SEC");
            if !anchors.contains(&(a, s.direction)) {
                anchors.push((a, s.direction));
            }
        }
        Ok(PatternModel { points, sequences, anchors })
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    /// Anchor used by every robot when overlapping.
    pub fn canonical_anchor(&self) -> (usize, Chirality) {
        self.anchors[0]
    }

    fn boundary_indices(&self, tol: Tolerance) -> Vec<usize> {
        (0..self.k()).filter(|&i| self.points[i].norm() >= 1.0 - tol.eps).collect()
    }

    /// Places the pattern with `anchor` on `target`, its `direction` mapped to `sense`.
    pub fn place(&self, anchor: usize, direction: Chirality, target: Point, sense: Chirality) -> (Similarity, Vec<Point>) {
        let t = Similarity::anchored(&UNIT, self.points[anchor], &UNIT, target, direction != sense);
        (t, self.points.iter().map(|&p| t.apply(p)).collect())
    }
}

/// Robots and placed pattern in the observer's scene: the SEC is the unit circle at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointConfiguration {
    pub robot_points: Vec<Point>,
    /// Placed pattern, indexed like the input pattern.
    pub pattern_points: Vec<Point>,
    #[serde(skip)]
    pub overlap_transform: Option<Similarity>,
    pub anchor_index: usize,
    /// Leader angular sequence of the robots alone.
    pub robot_leader: LeaderAngularSequence,
    /// Leader angular sequence of robots and pattern together, when it agrees with `robot_leader`.
    pub leader: Option<LeaderAngularSequence>,
}

impl JointConfiguration {
    pub fn anchor(&self) -> Point {
        self.robot_leader.boundary_point
    }

    pub fn sense(&self) -> Chirality {
        self.robot_leader.orientation
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternRanking {
    /// Pattern indices, highest priority first.
    pub order: Vec<usize>,
    pub ranked_points: Vec<Point>,
    pub circle_index: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkerChoice {
    pub walker: Point,
    pub target: Point,
    /// Polyline from the walker to the target: one or two segments.
    pub path: Vec<Point>,
}

/// Moves one local unit along +x, or halfway to the first point in the way.
pub fn separate(snap: &Snapshot) -> Point {
    let me = snap.own();
    let on_axis = snap
        .others()
        .map(|p| p - me)
        .filter(|v| v.x > 0.0 && v.y.abs() <= 1e-9 * v.x.max(1.0))
        .min_by(|a, b| a.x.total_cmp(&b.x));
    match on_axis {
        Some(v) if v.x <= 1.0 => me + Point::new(v.x / 2.0, 0.0),
        _ => me + Point::new(1.0, 0.0),
    }
}

fn is_responsible(points: &[Point], p: Point, tol: Tolerance) -> bool {
    if p.norm() < 1.0 - tol.eps {
        return false;
    }
    let rest: Vec<Point> = points.iter().copied().filter(|q| q.dist(p) > tol.eps).collect();
    match smallest_enclosing_circle(&rest, tol) {
        Ok(c) => c.radius < 1.0 - tol.eps,
        Err(_) => true,
    }
}

pub(crate) fn rank_placed(placed: &[Point], anchor: usize, sense: Chirality, tol: Tolerance) -> PatternRanking {
    let dec = decompose_about(placed, &UNIT, tol);
    let p1 = placed[anchor];
    let a1 = p1.angle();
    let cw_from_anchor = |i: usize| {
        if placed[i].norm() <= tol.eps {
            0.0
        } else {
            let s = sweep(a1, placed[i].angle(), sense);
            if s >= 2.0 * PI - tol.eps {
                0.0
            } else {
                s
            }
        }
    };
    let mut order = vec![anchor];
    for c in 0..dec.sigma() {
        let mut members: Vec<usize> =
            (0..placed.len()).filter(|&i| dec.assignment[i] == c && i != anchor).collect();
        if c == 0 {
            let anti = a1 + PI;
            let antipodal = members.iter().position(|&i| co_radial(placed[i], -p1, Point::ORIGIN, tol));
            if let Some(pos) = antipodal {
                order.push(members.remove(pos));
            } else if members.len() >= 2 {
                let nearest = |m: &[usize], s: Chirality| {
                    *m.iter()
                        .min_by(|&&x, &&y| {
                            sweep(anti, placed[x].angle(), s).total_cmp(&sweep(anti, placed[y].angle(), s))
                        })
                        .expect("nonempty")
                };
                let ccw = nearest(&members, sense.flip());
                members.retain(|&i| i != ccw);
                let cw = nearest(&members, sense);
                members.retain(|&i| i != cw);
                order.push(ccw);
                order.push(cw);
            }
        }
        members.sort_by(|&x, &y| cw_from_anchor(x).total_cmp(&cw_from_anchor(y)));
        order.extend(members);
    }
    PatternRanking {
        ranked_points: order.iter().map(|&i| placed[i]).collect(),
        circle_index: order.iter().map(|&i| dec.assignment[i]).collect(),
        order,
    }
}

pub fn rank_pattern_points(gamma: &JointConfiguration, tol: Tolerance) -> PatternRanking {
    rank_placed(&gamma.pattern_points, gamma.anchor_index, gamma.sense(), tol)
}

pub(crate) fn overlap_scene(points: &[Point], model: &PatternModel, tol: Tolerance) -> Option<JointConfiguration> {
    let lq = leader_angular_sequence_in(points, None, &UNIT, tol)?;
    let (anchor, direction) = model.canonical_anchor();
    let (t, placed) = model.place(anchor, direction, lq.boundary_point, lq.orientation);
    let lg = leader_angular_sequence_in(points, Some(&placed), &UNIT, tol).filter(|lg| {
        lg.orientation == lq.orientation
            && lg.inner_point.dist(lq.inner_point) <= tol.eps
            && lg.boundary_point.dist(lq.boundary_point) <= tol.eps
    });
    Some(JointConfiguration {
        robot_points: points.to_vec(),
        pattern_points: placed,
        overlap_transform: Some(t),
        anchor_index: anchor,
        robot_leader: lq,
        leader: lg,
    })
}

/// Joint configuration of a snapshot, in the snapshot's normalised scene.
pub fn overlap(snap: &Snapshot, pattern: &[Point], tol: Tolerance) -> Option<JointConfiguration> {
    let model = PatternModel::new(pattern, tol).ok()?;
    let scene = Scene::from_snapshot(snap, tol)?;
    overlap_scene(&scene.points, &model, tol)
}

/// Finalization certificate: placed pattern and the index of `p̂_k`.
fn certificate(points: &[Point], model: &PatternModel, tol: Tolerance) -> Option<(Vec<Point>, usize)> {
    let eps = tol.eps;
    let anchors: Vec<usize> = model.boundary_indices(tol).into_iter().take(2).collect();
    let targets: Vec<Point> = points.iter().copied().filter(|p| p.norm() >= 1.0 - eps).collect();
    for &a in &anchors {
        for &q in &targets {
            for reflect in [false, true] {
                let t = Similarity::anchored(&UNIT, model.points[a], &UNIT, q, reflect);
                let placed: Vec<Point> = model.points.iter().map(|&p| t.apply(p)).collect();
                let unocc: Vec<usize> = (0..placed.len())
                    .filter(|&i| !points.iter().any(|r| r.dist(placed[i]) <= eps))
                    .collect();
                if unocc.len() > 1 {
                    continue;
                }
                let extras: Vec<Point> = points
                    .iter()
                    .copied()
                    .filter(|r| !placed.iter().any(|p| p.dist(*r) <= eps))
                    .collect();
                if extras.is_empty() {
                    continue;
                }
                let candidates: Vec<usize> = match unocc.first() {
                    Some(&i) => vec![i],
                    None => (0..placed.len()).collect(),
                };
                for pk in candidates {
                    if !extras.iter().all(|e| on_segment(*e, Point::ORIGIN, placed[pk], eps)) {
                        continue;
                    }
                    for &(ai, dir) in &model.anchors {
                        let sense = if reflect { dir.flip() } else { dir };
                        let r = rank_placed(&placed, ai, sense, tol);
                        if r.order.last() == Some(&pk) {
                            return Some((placed, pk));
                        }
                    }
                }
            }
        }
    }
    None
}

fn last_scene(scene: &Scene, model: &PatternModel, tol: Tolerance) -> Option<(Point, Branch)> {
    let me = scene.me();
    if is_similar(&scene.points, &model.points, tol) {
        return Some((me, Branch::Formed));
    }
    let (placed, pk) = certificate(&scene.points, model, tol)?;
    let at_pattern = placed.iter().any(|p| p.dist(me) <= tol.eps);
    if at_pattern {
        Some((me, Branch::Finalize))
    } else {
        Some((placed[pk], Branch::Finalize))
    }
}

/// Procedure Last; `None` when neither certificate holds.
pub fn last(snap: &Snapshot, pattern: &[Point], tol: Tolerance) -> Option<Point> {
    let model = PatternModel::new(pattern, tol).ok()?;
    let scene = Scene::from_snapshot(snap, tol)?;
    last_scene(&scene, &model, tol).map(|(p, _)| scene.destination(snap, p))
}

fn ccw_gaps(rays: &[Point]) -> Vec<f64> {
    let l = rays.len();
    (0..l)
        .map(|i| sweep(rays[i].angle(), rays[(i + 1) % l].angle(), Chirality::Counterclockwise))
        .collect()
}

/// Boundary ray starting the lexicographically smallest angle sequence, its direction, and ξ.
fn canonical_reference(points: &[Point], tol: Tolerance) -> Option<(Point, Chirality, f64)> {
    let rays: Vec<Point> = s_prime_rays(points, None, Point::ORIGIN, tol).iter().map(|s| s.point).collect();
    let l = rays.len();
    if l < 2 {
        return None;
    }
    let gaps = ccw_gaps(&rays);
    let xi = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best: Option<(Vec<Triple>, Point, Chirality)> = None;
    for dir in [Chirality::Counterclockwise, Chirality::Clockwise] {
        for start in (0..l).filter(|&i| rays[i].norm() >= 1.0 - tol.eps) {
            let step = |m: usize| match dir {
                Chirality::Counterclockwise => (start + m) % l,
                Chirality::Clockwise => (start + l - m % l) % l,
            };
            let seq: Vec<Triple> = (0..l)
                .map(|m| {
                    let (a, b) = (step(m), step(m + 1));
                    let angle = match dir {
                        Chirality::Counterclockwise => gaps[a],
                        Chirality::Clockwise => gaps[b],
                    };
                    Triple { angle, first: rays[a].norm(), second: rays[b].norm() }
                })
                .collect();
            let better = best
                .as_ref()
                .is_none_or(|(b, _, _)| compare_sequences(&seq, b, tol) == Ordering::Less);
            if better {
                best = Some((seq, rays[start], dir));
            }
        }
    }
    best.map(|(_, q, d)| (q, d, xi))
}

fn leader_scene(
    scene: &Scene,
    model: &PatternModel,
    gamma: Option<&JointConfiguration>,
    tol: Tolerance,
) -> (Point, Branch) {
    let pts = &scene.points;
    let me = scene.me();
    let eps = tol.eps;
    let center_occupied = pts.iter().any(|p| p.norm() <= eps);
    if !center_occupied {
        if is_responsible(pts, me, tol) {
            return (me, Branch::LeaderStay);
        }
        if pts.iter().any(|&p| p != me && strictly_inside_segment(p, me, Point::ORIGIN, eps)) {
            return (me, Branch::LeaderStay);
        }
        if let Some(g) = gamma {
            let l = &g.robot_leader;
            let defines = me.dist(l.inner_point) <= eps || me.dist(l.boundary_point) <= eps;
            let alone = !pts.iter().any(|&p| p != me && co_radial(p, me, Point::ORIGIN, tol));
            if defines && alone {
                return (me, Branch::LeaderStay);
            }
        }
        return (Point::ORIGIN, Branch::LeaderToCenter);
    }
    if me.norm() > eps {
        return (me, Branch::LeaderStay);
    }
    let reference = match gamma {
        // ξ also covers the pattern as it will be placed once the leader leaves O.
        None => canonical_reference(pts, tol).map(|(qj, sense, xi)| {
            let (anchor, direction) = model.canonical_anchor();
            let (_, placed) = model.place(anchor, direction, qj * (1.0 / qj.norm()), sense);
            let rays: Vec<Point> =
                s_prime_rays(pts, Some(&placed), Point::ORIGIN, tol).iter().map(|s| s.point).collect();
            let xi = ccw_gaps(&rays).into_iter().fold(xi, f64::min);
            (qj, sense, xi)
        }),
        Some(g) => {
            let rays: Vec<Point> = s_prime_rays(pts, Some(&g.pattern_points), Point::ORIGIN, tol)
                .iter()
                .map(|s| s.point)
                .collect();
            let xi = ccw_gaps(&rays).into_iter().fold(f64::INFINITY, f64::min);
            (rays.len() >= 2).then(|| (g.robot_leader.boundary_point, g.sense(), xi))
        }
    };
    match reference {
        Some((qj, sense, xi)) => {
            let dir = qj * (1.0 / qj.norm());
            (dir.rotate(-sense.signum() * xi / 3.0) * 0.5, Branch::LeaderPlace)
        }
        None => (me, Branch::LeaderStay),
    }
}

/// Procedure Leader. `gamma` must be expressed in the snapshot's normalised scene.
pub fn leader(snap: &Snapshot, pattern: &[Point], gamma: Option<&JointConfiguration>, tol: Tolerance) -> Point {
    let Ok(model) = PatternModel::new(pattern, tol) else {
        return snap.own();
    };
    match Scene::from_snapshot(snap, tol) {
        Some(scene) => scene.destination(snap, leader_scene(&scene, &model, gamma, tol).0),
        None => snap.own(),
    }
}

/// Walker selected by Procedure Occupy, with its target and path.
pub fn walker(gamma: &JointConfiguration, tol: Tolerance) -> Option<WalkerChoice> {
    let pts = &gamma.robot_points;
    let placed = &gamma.pattern_points;
    let eps = tol.eps;
    let o = Point::ORIGIN;
    let ranking = rank_pattern_points(gamma, tol);
    let occupied = |p: Point| pts.iter().any(|q| q.dist(p) <= eps);
    let l = ranking
        .order
        .iter()
        .copied()
        .find(|&i| !occupied(placed[i]))
        .unwrap_or(*ranking.order.last().expect("nonempty pattern"));
    let pl = placed[l];

    // A robot at a center pattern point is still in transit unless the center is the target.
    let settled = |q: Point| placed.iter().any(|p| p.norm() > eps && p.dist(q) <= eps);
    let inner = gamma.leader.as_ref().map(|s| s.inner_point);
    let is_inner = |q: Point| inner.is_some_and(|s| s.dist(q) <= eps);
    let free: Vec<Point> = pts
        .iter()
        .copied()
        .filter(|&q| !settled(q) && !is_responsible(pts, q, tol))
        .collect();
    let mut cands: Vec<Point> = free.iter().copied().filter(|&q| !is_inner(q)).collect();
    if cands.is_empty() {
        cands = free.clone();
    }
    let walkers = cands.clone();
    let can_walk = |q: Point| walkers.iter().any(|c| c.dist(q) <= eps);
    let path_of = |w: Point| {
        if co_radial(w, pl, o, tol) {
            vec![w, pl]
        } else {
            vec![w, o, pl]
        }
    };
    let choice = |w: Point| Some(WalkerChoice { walker: w, target: pl, path: path_of(w) });

    if pl.norm() > eps {
        let end = pl * (1.0 / pl.norm());
        let on_ray: Vec<Point> = pts
            .iter()
            .copied()
            .filter(|&q| q.norm() > eps && q.dist(pl) > eps && on_segment(q, o, end, eps))
            .collect();
        if !on_ray.is_empty() {
            let mut eligible: Vec<Point> = on_ray
                .iter()
                .copied()
                .filter(|&v| {
                    can_walk(v) && !pts.iter().any(|&r| strictly_inside_segment(r, v, pl, eps))
                })
                .collect();
            eligible.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
            if let Some(&v) = eligible.first() {
                return choice(v);
            }
        }
    }

    let p1 = gamma.anchor();
    let sense = gamma.sense();
    let prio = |q: Point| radiangular_distance(p1, q, o, sense, tol);
    cands.sort_by(|a, b| radiangular_priority(&prio(*a), &prio(*b), tol).then(a.lex_cmp(b)));
    for &u in &cands {
        let path = path_of(u);
        let mut blockers: Vec<Point> = Vec::new();
        let mut stuck = false;
        for &r in pts.iter().filter(|&&r| r.dist(u) > eps && r.dist(pl) > eps) {
            let via_center = path.len() == 3 && r.norm() <= eps;
            let inside = path.windows(2).any(|s| strictly_inside_segment(r, s[0], s[1], eps));
            if via_center {
                if can_walk(r) {
                    blockers.push(r);
                }
            } else if inside {
                if can_walk(r) {
                    blockers.push(r);
                } else {
                    stuck = true;
                }
            }
        }
        if stuck {
            continue;
        }
        let remaining = |r: Point| {
            if co_radial(r, pl, o, tol) {
                r.dist(pl)
            } else {
                r.norm() + pl.norm()
            }
        };
        let w = blockers
            .into_iter()
            .min_by(|a, b| remaining(*a).total_cmp(&remaining(*b)))
            .unwrap_or(u);
        return choice(w);
    }
    None
}

fn occupy_scene(gamma: &JointConfiguration, me: Point, tol: Tolerance) -> (Point, Branch, Option<Point>) {
    match walker(gamma, tol) {
        Some(w) if w.walker.dist(me) <= tol.eps => {
            if w.path.len() == 2 {
                (w.target, Branch::OccupyWalk, None)
            } else {
                (Point::ORIGIN, Branch::OccupyWalk, Some(w.target))
            }
        }
        _ => (me, Branch::OccupyStay, None),
    }
}

/// Procedure Occupy for the robot at `observer` (normalised scene coordinates).
pub fn occupy(gamma: &JointConfiguration, observer: Point, tol: Tolerance) -> Point {
    occupy_scene(gamma, observer, tol).0
}

/// The pattern-formation program for patterns of at least five points.
#[derive(Clone, Debug)]
pub struct SeqPf {
    model: PatternModel,
    tol: Tolerance,
}

impl SeqPf {
    pub fn new(pattern: &[Point], tol: Tolerance) -> Result<Self> {
        if pattern.len() < 3 {
            return Err(usage("seq-pf needs a pattern of at least three points"));
        }
        Ok(SeqPf { model: PatternModel::new(pattern, tol)?, tol })
    }

    pub fn model(&self) -> &PatternModel {
        &self.model
    }

    pub fn decide(&self, snap: &Snapshot) -> Decision {
        let tol = self.tol;
        if snap.points.len() < self.model.k() {
            return Decision::to(separate(snap), Branch::Separate);
        }
        let Some(scene) = Scene::from_snapshot(snap, tol) else {
            return Decision::to(separate(snap), Branch::Separate);
        };
        let (p, branch, target) = if let Some((p, b)) = last_scene(&scene, &self.model, tol) {
            (p, b, None)
        } else {
            match overlap_scene(&scene.points, &self.model, tol) {
                Some(g) if g.leader.is_some() => occupy_scene(&g, scene.me(), tol),
                g => {
                    let (p, b) = leader_scene(&scene, &self.model, g.as_ref(), tol);
                    (p, b, None)
                }
            }
        };
        Decision {
            destination: scene.destination(snap, p),
            branch,
            target: target.map(|t| scene.to_outer(t)),
        }
    }

    pub fn stage(&self, q: &[Point]) -> Stage {
        let tol = self.tol;
        if q.len() < self.model.k() {
            return Stage::Initialization;
        }
        let Some(scene) = Scene::new(q, 0, tol) else {
            return Stage::Initialization;
        };
        if is_similar(&scene.points, &self.model.points, tol) {
            return Stage::Formed;
        }
        if certificate(&scene.points, &self.model, tol).is_some() {
            return Stage::Finalization;
        }
        match overlap_scene(&scene.points, &self.model, tol) {
            Some(g) if g.leader.is_some() => Stage::PartialPatternFormation,
            _ => Stage::LeaderConfiguration,
        }
    }

    /// Placed pattern in the coordinates of `q`, when a joint configuration exists.
    pub fn placed_pattern_global(&self, q: &[Point]) -> Option<Vec<Point>> {
        let scene = Scene::new(q, 0, self.tol)?;
        if let Some((placed, _)) = certificate(&scene.points, &self.model, self.tol) {
            return Some(placed.iter().map(|&p| scene.to_outer(p)).collect());
        }
        let g = overlap_scene(&scene.points, &self.model, self.tol)?;
        Some(g.pattern_points.iter().map(|&p| scene.to_outer(p)).collect())
    }

    pub(crate) fn walker_global(&self, q: &[Point]) -> Option<WalkerChoice> {
        let scene = Scene::new(q, 0, self.tol)?;
        let g = overlap_scene(&scene.points, &self.model, self.tol)?;
        g.leader.as_ref()?;
        let w = walker(&g, self.tol)?;
        Some(WalkerChoice {
            walker: scene.to_outer(w.walker),
            target: scene.to_outer(w.target),
            path: w.path.iter().map(|&p| scene.to_outer(p)).collect(),
        })
    }
}

pub fn seq_pf(snap: &Snapshot, pattern: &[Point], tol: Tolerance) -> Result<Point> {
    Ok(SeqPf::new(pattern, tol)?.decide(snap).destination)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polar(deg: f64, r: f64) -> Point {
        Point::polar(r, deg.to_radians())
    }

    /// Radius and clockwise bearing pairs of the reference pattern.
    const PATTERN: [(f64, f64); 9] = [
        (1.0, 45.0),
        (3.0, 45.0),
        (0.5, 90.0),
        (3.0, 135.0),
        (1.0, 180.0),
        (3.0, 225.0),
        (0.5, 270.0),
        (1.0, 300.0),
        (3.0, 315.0),
    ];

    fn pattern() -> Vec<Point> {
        PATTERN.iter().map(|&(r, a)| polar(450.0 - a, r)).collect()
    }

    fn robots(extra: &[(f64, f64)]) -> Vec<Point> {
        let mut v: Vec<Point> = [
            (10.0, 3.0),
            (40.0, 3.0),
            (42.5, 1.5),
            (60.0, 1.4),
            (100.0, 0.8),
            (100.0, 3.0),
            (140.0, 0.8),
            (160.0, 3.0),
            (240.0, 2.2),
            (290.0, 1.8),
            (310.0, 3.0),
        ]
        .iter()
        .map(|&(a, r)| polar(a, r / 3.0))
        .collect();
        for &(a, r) in extra {
            v.push(polar(a, r / 3.0));
        }
        v
    }

    fn joint(points: &[Point]) -> JointConfiguration {
        let t = Tolerance::default();
        let model = PatternModel::new(&pattern(), t).unwrap();
        overlap_scene(points, &model, t).unwrap()
    }

    #[test]
    fn canonical_anchor_is_outer_point_clockwise() {
        let model = PatternModel::new(&pattern(), Tolerance::default()).unwrap();
        assert_eq!(model.anchors, vec![(1, Chirality::Clockwise)]);
    }

    #[test]
    fn overlap_places_anchor_on_leader_boundary() {
        let g = joint(&robots(&[]));
        assert!(g.anchor().dist(polar(40.0, 1.0)) < 1e-9);
        assert_eq!(g.sense(), Chirality::Clockwise);
        assert!(g.leader.is_some());
        for (i, &(r, a)) in PATTERN.iter().enumerate() {
            assert!(g.pattern_points[i].dist(polar(445.0 - a, r / 3.0)) < 1e-9, "point {i}");
        }
    }

    #[test]
    fn ranking_matches_hand_order() {
        let g = joint(&robots(&[]));
        let r = rank_pattern_points(&g, Tolerance::default());
        assert_eq!(r.order, vec![1, 5, 3, 8, 0, 4, 7, 2, 6]);
        assert_eq!(r.circle_index, vec![0, 0, 0, 0, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn walkers_follow_priority() {
        let t = Tolerance::default();
        let g = joint(&robots(&[]));
        let w = walker(&g, t).unwrap();
        assert!(w.walker.dist(polar(10.0, 1.0)) < 1e-9);
        assert!(w.target.dist(polar(220.0, 1.0)) < 1e-9);
        assert_eq!(occupy(&g, w.walker, t), Point::ORIGIN);

        let mut pts = robots(&[]);
        pts[0] = polar(220.0, 1.0);
        let g = joint(&pts);
        let w = walker(&g, t).unwrap();
        assert!(w.walker.dist(polar(290.0, 0.6)) < 1e-9);
        assert!(w.target.dist(polar(130.0, 1.0)) < 1e-9);
        assert_eq!(w.path.len(), 3);
    }

    #[test]
    fn walker_co_radial_goes_straight() {
        let t = Tolerance::default();
        let mut pts = robots(&[]);
        pts[8] = polar(220.0, 0.5);
        let g = joint(&pts);
        let w = walker(&g, t).unwrap();
        assert!(w.walker.dist(polar(220.0, 0.5)) < 1e-9);
        assert_eq!(occupy(&g, w.walker, t), w.target);
    }

    #[test]
    fn separate_examples() {
        let s = Snapshot { points: vec![Point::ORIGIN, Point::new(2.0, 0.0)], multiplicity_bits: None, self_index: 0 };
        assert_eq!(separate(&s), Point::new(1.0, 0.0));
        let s = Snapshot { points: vec![Point::ORIGIN, Point::new(0.5, 0.0)], multiplicity_bits: None, self_index: 0 };
        assert_eq!(separate(&s), Point::new(0.25, 0.0));
    }

    #[test]
    fn leader_moves_to_center_then_places() {
        let t = Tolerance::default();
        let pts: Vec<Point> = [0.0, 70.0, 150.0, 230.0, 300.0]
            .iter()
            .map(|&a| polar(a, 1.0))
            .chain([polar(100.0, 0.4)])
            .collect();
        let model = PatternModel::new(&pattern(), t).unwrap();
        let scene = Scene::new(&pts, 5, t).unwrap();
        assert_eq!(leader_scene(&scene, &model, None, t), (Point::ORIGIN, Branch::LeaderToCenter));
        let mut pts = pts;
        pts[5] = Point::ORIGIN;
        let scene = Scene::new(&pts, 5, t).unwrap();
        let (p, b) = leader_scene(&scene, &model, None, t);
        assert_eq!(b, Branch::LeaderPlace);
        assert!((p.norm() - 0.5).abs() < 1e-12);
        let placed = pts_with(&pts, 5, p);
        let lam = leader_angular_sequence_in(&placed, None, &UNIT, t).unwrap();
        assert!(lam.inner_point.dist(p) < 1e-12);
        assert!(overlap_scene(&placed, &model, t).unwrap().leader.is_some());
    }

    fn pts_with(pts: &[Point], i: usize, p: Point) -> Vec<Point> {
        let mut v = pts.to_vec();
        v[i] = p;
        v
    }
}
