use serde::{Deserialize, Serialize};

use super::{run, Engine, Trace};
use crate::algorithms::{AlgorithmKind, Program};
use crate::error::{usage, Error, Result};
use crate::geometry::{smallest_enclosing_circle, Point, Tolerance};
use crate::model::{apply_move, Configuration, Orientation, RobotId};
use crate::scenario::{FramesSpec, Scenario};
use crate::schedulers::{ActivationKind, ActivationSpec, MovementKind, MovementSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapReport {
    pub q0: usize,
    pub max_q: usize,
    pub rounds: u64,
    pub formed: bool,
    pub trap_confirmed: bool,
}

/// Runs `algorithm` under FSYNC with rigid moves and one shared frame, from a
/// start with a multiplicity and fewer distinct points than the pattern.
pub fn demo_fsync_trap(
    pattern: &[Point],
    start: &[Point],
    algorithm: AlgorithmKind,
    rounds: u64,
) -> Result<(Trace, TrapReport)> {
    let tol = Tolerance::default();
    let config = Configuration::new(start.to_vec(), tol)?;
    let q0 = config.distinct_count();
    if q0 == config.len() {
        return Err(usage("fsync trap needs a start configuration with a multiplicity"));
    }
    if q0 >= pattern.len() {
        return Err(usage(format!(
            "fsync trap needs fewer distinct points ({q0}) than pattern points ({})",
            pattern.len()
        )));
    }
    let scenario = Scenario {
        robots: start.to_vec(),
        frames: FramesSpec::Explicit(vec![Orientation::IDENTITY; start.len()]),
        pattern: pattern.to_vec(),
        algorithm,
        activation: ActivationSpec { kind: ActivationKind::Fsync, seed: None, script: None, window: None },
        movement: MovementSpec { kind: MovementKind::Rigid, delta: 1e-3, seed: None, script: None },
        weak_detection: false,
        eps: tol.eps,
        max_rounds: Some(rounds),
        seed: 0,
    };
    let trace = run(&scenario)?;
    let max_q = trace.q_count_series.iter().copied().max().unwrap_or(q0);
    let formed = trace.formed_at.is_some();
    let report = TrapReport {
        q0,
        max_q,
        rounds: trace.events.len() as u64,
        formed,
        trap_confirmed: !formed && max_q <= q0,
    };
    Ok((trace, report))
}

/// A seeded trap start: `n` robots on `sites` distinct points, at least one shared.
pub fn trap_start(seed: u64, n: usize, sites: usize) -> Vec<Point> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sites = sites.clamp(1, n.saturating_sub(1).max(1));
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < sites {
        let p = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if pts.iter().all(|q| q.dist(p) >= 0.1) {
            pts.push(p);
        }
    }
    while pts.len() < n {
        let i = rng.gen_range(0..sites);
        pts.push(pts[i]);
    }
    pts
}

/// The three possible reactions of a robot seeing exactly two points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Act {
    Stay,
    MoveToOther,
    MoveElsewhere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorReport {
    pub candidate: AlgorithmKind,
    pub bits_granted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub act: Option<Act>,
    pub rounds: u64,
    pub min_q: usize,
    pub gathered: bool,
    /// Smallest ratio of closest to farthest pair seen; values near eps mean the run hit precision limits.
    pub min_shape_ratio: f64,
    pub verdict: String,
}

/// `n − 1` robots at the origin and one at `(1, 0)`.
pub fn mirror_start(n: usize) -> Vec<Point> {
    let mut v = vec![Point::ORIGIN; n - 1];
    v.push(Point::new(1.0, 0.0));
    v
}

/// Mirror frames while two points are occupied: the other point sits at local
/// `(1, 0)` and the two points use opposite handedness.
fn mirror_frame(config: &Configuration, robot: RobotId) -> Orientation {
    let q = config.q_points();
    let me = config.positions()[robot.0];
    if q.len() != 2 {
        return Orientation::IDENTITY;
    }
    let other = if q[0] == me { q[1] } else { q[0] };
    let v = other - me;
    let first = q.iter().min_by(|a, b| a.lex_cmp(b)).copied() == Some(me);
    let handedness = if first { 1 } else { -1 };
    Orientation { rotation: -v.angle(), handedness, unit: v.norm() }
}

fn shape_ratio(points: &[Point]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..points.len() {
        for j in 0..i {
            let d = points[i].dist(points[j]);
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

fn mirror_scenario(candidate: AlgorithmKind, n: usize, rounds: u64, bits: bool) -> Scenario {
    Scenario {
        robots: mirror_start(n),
        frames: FramesSpec::Explicit(vec![Orientation::IDENTITY; n]),
        pattern: vec![Point::ORIGIN],
        algorithm: candidate,
        activation: ActivationSpec { kind: ActivationKind::SeqRoundRobin, seed: None, script: None, window: None },
        movement: MovementSpec { kind: MovementKind::Rigid, delta: 1e-3, seed: None, script: None },
        weak_detection: bits,
        eps: Tolerance::default().eps,
        max_rounds: Some(rounds),
        seed: 0,
    }
}

/// Plays the mirror adversary against `candidate` for `rounds` sequential rounds.
///
/// With bits granted the candidate runs as a plain round-robin control instead.
pub fn demo_mirror_gathering(
    candidate: AlgorithmKind,
    n: usize,
    rounds: u64,
    grant_bits: bool,
) -> Result<(Trace, MirrorReport)> {
    if n < 3 {
        return Err(usage("the mirror scenario needs at least three robots"));
    }
    let tol = Tolerance::default();
    let program = Program::new(candidate, &[Point::ORIGIN], tol)?;
    if program.requires_bits() && !grant_bits {
        return Err(Error::Capability(format!(
            "{candidate:?} needs weak multiplicity detection; the mirror scenario withholds it"
        )));
    }
    if grant_bits {
        let trace = run(&mirror_scenario(candidate, n, rounds, true))?;
        let min_q = trace.q_count_series.iter().copied().min().unwrap_or(0);
        let gathered = trace.formed_at.is_some();
        let report = MirrorReport {
            candidate,
            bits_granted: true,
            act: None,
            rounds: trace.events.len() as u64,
            min_q,
            gathered,
            min_shape_ratio: 0.0,
            verdict: if gathered { "gathered".into() } else { "not-gathered".into() },
        };
        return Ok((trace, report));
    }

    let mut engine = Engine::new(mirror_scenario(candidate, n, rounds, false))?;
    engine.set_frame_rule(mirror_frame);
    let probe = engine.plan(RobotId(0))?;
    let local = probe.decision.destination;
    let act = if probe.is_stay() {
        Act::Stay
    } else if local.dist(Point::new(1.0, 0.0)) <= tol.eps {
        Act::MoveToOther
    } else {
        Act::MoveElsewhere
    };
    let rigid = |p: &super::Plan| Ok(p.start.dist(p.intended));
    let window = 3 * n as u64;
    let mut min_ratio = f64::INFINITY;
    let mut queue: Vec<RobotId> = Vec::new();
    while engine.round() < rounds {
        let pick = match act {
            Act::Stay => RobotId((engine.round() % n as u64) as usize),
            Act::MoveToOther => {
                if queue.is_empty() {
                    queue = switching_cycle(engine.config());
                    queue.reverse();
                }
                queue.pop().expect("nonempty cycle")
            }
            Act::MoveElsewhere => greedy_pick(&engine, n, window)?,
        };
        engine.step(&[pick], rigid)?;
        if act == Act::MoveElsewhere {
            engine.renormalize()?;
        }
        let q = engine.config().q_points();
        if q.len() > 1 {
            min_ratio = min_ratio.min(shape_ratio(&q));
        }
        if q.len() == 1 {
            break;
        }
    }
    let trace = engine.trace();
    let min_q = trace.q_count_series.iter().copied().min().unwrap_or(0);
    let gathered = min_q <= 1;
    let verdict = if gathered {
        "gathered"
    } else if min_ratio <= 1e3 * tol.eps {
        "precision-limited"
    } else {
        "not-gathered"
    };
    let report = MirrorReport {
        candidate,
        bits_granted: false,
        act: Some(act),
        rounds: trace.events.len() as u64,
        min_q,
        gathered,
        min_shape_ratio: if min_ratio.is_finite() { min_ratio } else { 1.0 },
        verdict: verdict.into(),
    };
    Ok((trace, report))
}

/// One switching cycle: all but one robot of the crowded point, then the lone
/// robot, then the one left behind. Afterwards the two points have swapped populations.
fn switching_cycle(config: &Configuration) -> Vec<RobotId> {
    let q = config.q_points();
    let at = |p: Point| -> Vec<RobotId> { config.robot_ids().filter(|r| config.positions()[r.0] == p).collect() };
    if q.len() != 2 {
        return config.robot_ids().collect();
    }
    let (a, b) = (at(q[0]), at(q[1]));
    let (mut crowd, lone) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let last = crowd.pop().expect("crowded point is occupied");
    crowd.extend(lone);
    crowd.push(last);
    crowd
}

/// Fair greedy schedule: a starved robot if any, otherwise the activation that
/// keeps the occupied points least degenerate.
fn greedy_pick(engine: &Engine, n: usize, window: u64) -> Result<RobotId> {
    let next = engine.round() + 1;
    if let Some(r) = (0..n)
        .map(RobotId)
        .filter(|&r| engine.ledger().idle(r, next) >= window)
        .max_by_key(|&r| (engine.ledger().idle(r, next), std::cmp::Reverse(r)))
    {
        return Ok(r);
    }
    let mut best = (f64::NEG_INFINITY, RobotId(0));
    for r in (0..n).map(RobotId) {
        let plan = engine.plan(r)?;
        let d = plan.start.dist(plan.intended);
        let (c, _) = apply_move(engine.config(), r, plan.intended, d, engine.scenario().delta())?;
        let q = c.q_points();
        let sec = smallest_enclosing_circle(&q, engine.scenario().tolerance())?;
        let score = if q.len() < 2 || sec.radius == 0.0 { f64::NEG_INFINITY } else { shape_ratio(&q) };
        if score > best.0 {
            best = (score, r);
        }
    }
    Ok(best.1)
}
