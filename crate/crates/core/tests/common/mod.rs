//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use oblot::geometry::{Chirality, Circle, Point};
use rand::Rng;

/// Reference pattern: (radius, clockwise bearing in degrees from north).
pub const FIG_PATTERN: [(f64, f64); 9] = [
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

pub fn polar_deg(deg: f64, r: f64) -> Point {
    Point::polar(r, deg.to_radians())
}

pub fn fig_pattern() -> Vec<Point> {
    FIG_PATTERN.iter().map(|&(r, a)| polar_deg(450.0 - a, r)).collect()
}

fn circumcircle(a: Point, b: Point, c: Point) -> Option<Circle> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < 1e-14 {
        return None;
    }
    let (a2, b2, c2) = (a.x * a.x + a.y * a.y, b.x * b.x + b.y * b.y, c.x * c.x + c.y * c.y);
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Point::new(ux, uy);
    Some(Circle { center, radius: center.dist(a) })
}

/// O(n⁴) smallest enclosing circle: every pair diameter and triple circumcircle.
pub fn brute_sec(points: &[Point]) -> Circle {
    if points.len() == 1 {
        return Circle { center: points[0], radius: 0.0 };
    }
    let encloses = |c: &Circle| points.iter().all(|p| p.dist(c.center) <= c.radius * (1.0 + 1e-12) + 1e-12);
    let mut best: Option<Circle> = None;
    let mut consider = |c: Circle| {
        if encloses(&c) && best.is_none_or(|b| c.radius < b.radius) {
            best = Some(c);
        }
    };
    for i in 0..points.len() {
        for j in 0..i {
            let center = points[i].midpoint(points[j]);
            consider(Circle { center, radius: center.dist(points[i]) });
            for k in 0..j {
                if let Some(c) = circumcircle(points[i], points[j], points[k]) {
                    consider(c);
                }
            }
        }
    }
    best.expect("some candidate encloses all points")
}

pub type Triples = Vec<(f64, f64, f64)>;

/// Triples of every pattern sequence of a pattern with no co-radial points and
/// no point at its center, by direct polar sorting: `(direction, start, triples)`.
pub fn brute_pattern_sequences(pattern: &[Point]) -> Vec<(Chirality, usize, Triples)> {
    let sec = brute_sec(pattern);
    let rel: Vec<(usize, f64, f64)> = pattern
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let v = *p - sec.center;
            (i, v.y.atan2(v.x).rem_euclid(std::f64::consts::TAU), v.norm() / sec.radius)
        })
        .collect();
    let mut sorted = rel.clone();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let k = sorted.len();
    let mut out = Vec::new();
    for dir in [Chirality::Counterclockwise, Chirality::Clockwise] {
        for s in 0..k {
            let idx = |m: usize| match dir {
                Chirality::Counterclockwise => (s + m) % k,
                Chirality::Clockwise => (s + k - (m % k)) % k,
            };
            let triples = (0..k)
                .map(|m| {
                    let (a, b) = (sorted[idx(m)], sorted[idx(m + 1)]);
                    let gap = match dir {
                        Chirality::Counterclockwise => b.1 - a.1,
                        Chirality::Clockwise => a.1 - b.1,
                    }
                    .rem_euclid(std::f64::consts::TAU);
                    (gap, a.2, b.2)
                })
                .collect();
            out.push((dir, sorted[s].0, triples));
        }
    }
    out
}

pub fn cmp_triples(a: &[(f64, f64, f64)], b: &[(f64, f64, f64)], eps: f64) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let c = |x: f64, y: f64| if (x - y).abs() <= eps { Equal } else if x < y { Less } else { Greater };
    for (x, y) in a.iter().zip(b) {
        let o = c(x.0, y.0).then(c(x.1, y.1)).then(c(x.2, y.2));
        if o != Equal {
            return o;
        }
    }
    Equal
}

pub fn random_points(rng: &mut impl Rng, n: usize, spread: f64) -> Vec<Point> {
    (0..n).map(|_| Point::new(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread))).collect()
}

/// Points in the unit disk with pairwise angular and radial separation, so no two are co-radial.
pub fn random_generic_pattern(rng: &mut impl Rng, k: usize) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::new();
    while pts.len() < k {
        let p = Point::polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let ok = pts.iter().all(|q| {
            let da = (p.angle() - q.angle()).rem_euclid(std::f64::consts::TAU);
            q.dist(p) > 0.05 && da > 1e-3 && da < std::f64::consts::TAU - 1e-3
        });
        if ok {
            pts.push(p);
        }
    }
    pts
}

use oblot::algorithms::Program;
use oblot::engine::generate::{scenario_for, Family};
use oblot::engine::Engine;
use oblot::model::{take_snapshot, Configuration, LocalFrame, Orientation, RobotId};
use oblot::scenario::{random_orientation, Scenario};
use oblot::schedulers::{ActivationPolicy, MovementPolicy};

/// Global destination of `robot` when it looks through orientation `o`.
pub fn global_destination(program: &Program, scenario: &Scenario, config: &Configuration, robot: usize, o: Orientation) -> Point {
    let start = config.positions()[robot];
    let frame = LocalFrame::new(start, o);
    let snap = take_snapshot(config, RobotId(robot), &frame, scenario.weak_detection).unwrap();
    let d = program.decide(&snap, scenario.tolerance()).unwrap();
    if d.is_stay(&snap) {
        start
    } else {
        frame.to_global(d.destination)
    }
}

/// Mid-run SeqPF configurations with at least `k` distinct points, sampled from seeded runs.
pub fn seq_pf_pool(count: usize, seed: u64) -> Vec<(Scenario, Configuration)> {
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        let scenario = scenario_for(Family::SeqPf, [5, 12], Some([5, 8]), s);
        s += 1;
        let mut engine = Engine::new(scenario.clone()).unwrap();
        let mut act = ActivationPolicy::new(&scenario.activation, scenario.seed);
        let mut mv = MovementPolicy::new(&scenario.movement, scenario.seed);
        let n = scenario.n();
        let stride = 7 + (s % 5);
        let mut taken = 0;
        while !engine.check_formed().unwrap() && engine.round() < 20_000 && taken < 5 {
            let a = act.next_activation(engine.round() + 1, n, engine.ledger()).unwrap();
            engine.step(&a, |p| mv.decide_truncation(p.start, p.intended)).unwrap();
            if engine.round().is_multiple_of(stride) && engine.config().distinct_count() >= scenario.k() {
                out.push((scenario.clone(), engine.config().clone()));
                taken += 1;
            }
        }
    }
    out.truncate(count);
    out
}

/// Largest deviation of any robot's global destination across `frames` random frames.
pub fn equivariance_error(scenario: &Scenario, config: &Configuration, frames: usize, rng: &mut impl Rng) -> f64 {
    let program = Program::new(scenario.algorithm, &scenario.pattern, scenario.tolerance()).unwrap();
    let rho = oblot::geometry::smallest_enclosing_circle(config.positions(), scenario.tolerance()).unwrap().radius;
    let mut worst = 0.0f64;
    for robot in 0..config.len() {
        let reference = global_destination(&program, scenario, config, robot, Orientation::IDENTITY);
        for _ in 0..frames {
            let o = random_orientation(rng, rho);
            let g = global_destination(&program, scenario, config, robot, o);
            worst = worst.max(g.dist(reference) / rho);
        }
    }
    worst
}
