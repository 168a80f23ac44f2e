//! World state: configurations, private frames, snapshots and the Move transition.

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::geometry::{check_finite, Point, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RobotId(pub usize);

impl std::fmt::Display for RobotId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Multiset of robot positions in the global frame.
///
/// Positions within eps of an earlier robot are snapped onto it, so co-located
/// robots share bit-identical coordinates and distinct points compare exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    positions: Vec<Point>,
    eps: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub point: Point,
    pub count: usize,
}

impl Configuration {
    pub fn new(positions: Vec<Point>, tol: Tolerance) -> Result<Self> {
        check_finite(&positions)?;
        let mut snapped: Vec<Point> = Vec::with_capacity(positions.len());
        for p in positions {
            let q = snapped.iter().copied().find(|s| s.dist(p) <= tol.eps).unwrap_or(p);
            snapped.push(q);
        }
        Ok(Configuration { positions: snapped, eps: tol.eps })
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance { eps: self.eps }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn robot_ids(&self) -> impl Iterator<Item = RobotId> {
        (0..self.positions.len()).map(RobotId)
    }

    pub fn position(&self, id: RobotId) -> Result<Point> {
        self.positions
            .get(id.0)
            .copied()
            .ok_or_else(|| usage(format!("unknown robot id {id}")))
    }

    /// Distinct occupied points, in order of first appearance.
    pub fn q_points(&self) -> Vec<Point> {
        self.census().into_iter().map(|c| c.point).collect()
    }

    pub fn census(&self) -> Vec<CensusEntry> {
        let mut out: Vec<CensusEntry> = Vec::new();
        for &p in &self.positions {
            match out.iter_mut().find(|c| c.point == p) {
                Some(c) => c.count += 1,
                None => out.push(CensusEntry { point: p, count: 1 }),
            }
        }
        out
    }

    pub fn distinct_count(&self) -> usize {
        self.census().len()
    }
}

pub fn count_distinct(config: &Configuration) -> (usize, Vec<CensusEntry>) {
    let c = config.census();
    (c.len(), c)
}

/// A robot's private orientation: how its axes and unit relate to the global frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Orientation {
    pub rotation: f64,
    pub handedness: i8,
    pub unit: f64,
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation { rotation: 0.0, handedness: 1, unit: 1.0 };

    pub fn validate(&self) -> Result<()> {
        if !(self.unit.is_finite() && self.unit > 0.0) || !self.rotation.is_finite() {
            return Err(Error::Model(format!("invalid frame {self:?}: unit must be positive")));
        }
        if self.handedness != 1 && self.handedness != -1 {
            return Err(Error::Model(format!("invalid frame handedness {}", self.handedness)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    pub origin: Point,
    pub rotation: f64,
    pub handedness: i8,
    pub unit: f64,
}

impl LocalFrame {
    pub fn new(origin: Point, o: Orientation) -> Self {
        LocalFrame { origin, rotation: o.rotation, handedness: o.handedness, unit: o.unit }
    }

    pub fn identity_at(origin: Point) -> Self {
        LocalFrame::new(origin, Orientation::IDENTITY)
    }

    pub fn to_local(&self, p: Point) -> Point {
        let v = ((p - self.origin) * (1.0 / self.unit)).rotate(self.rotation);
        Point::new(v.x, f64::from(self.handedness) * v.y)
    }

    pub fn to_global(&self, local: Point) -> Point {
        let v = Point::new(local.x, f64::from(self.handedness) * local.y);
        self.origin + v.rotate(-self.rotation) * self.unit
    }
}

pub fn to_global(frame: &LocalFrame, local_destination: Point) -> Point {
    frame.to_global(local_destination)
}

/// What one robot perceives in a Look phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    /// One entry per distinct occupied point, sorted lexicographically.
    pub points: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity_bits: Option<Vec<bool>>,
    pub self_index: usize,
}

impl Snapshot {
    pub fn own(&self) -> Point {
        self.points[self.self_index]
    }

    pub fn others(&self) -> impl Iterator<Item = Point> + '_ {
        let me = self.self_index;
        self.points.iter().enumerate().filter(move |(i, _)| *i != me).map(|(_, p)| *p)
    }
}

pub fn take_snapshot(
    config: &Configuration,
    robot: RobotId,
    frame: &LocalFrame,
    weak_detection: bool,
) -> Result<Snapshot> {
    let me = config.position(robot)?;
    let census = config.census();
    let mut local: Vec<(Point, bool, bool)> = census
        .iter()
        .map(|c| {
            let p = if c.point == me { Point::ORIGIN } else { frame.to_local(c.point) };
            (p, c.count > 1, c.point == me)
        })
        .collect();
    local.sort_by(|a, b| a.0.lex_cmp(&b.0));
    let self_index = local.iter().position(|x| x.2).expect("observer is in its own census");
    Ok(Snapshot {
        points: local.iter().map(|x| x.0).collect(),
        multiplicity_bits: weak_detection.then(|| local.iter().map(|x| x.1).collect()),
        self_index,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveOutcome {
    pub start: Point,
    pub intended: Point,
    pub actual: Point,
    pub stop_distance: f64,
    pub truncated: bool,
}

/// Legal stop-distance interval `[min(δ, d), d]`.
pub fn legal_interval(start: Point, intended: Point, delta: f64) -> (f64, f64) {
    let d = start.dist(intended);
    (delta.min(d), d)
}

/// Moves `robot` toward `intended`, stopping after `stop_distance`.
pub fn apply_move(
    config: &Configuration,
    robot: RobotId,
    intended: Point,
    stop_distance: f64,
    delta: f64,
) -> Result<(Configuration, MoveOutcome)> {
    let start = config.position(robot)?;
    if !intended.is_finite() || !stop_distance.is_finite() {
        return Err(Error::AdversaryContract("non-finite move".into()));
    }
    let (lo, d) = legal_interval(start, intended, delta);
    let slack = 1e-12 * d.max(1.0);
    if stop_distance < lo - slack || stop_distance > d + slack {
        return Err(Error::AdversaryContract(format!(
            "robot {robot}: stop distance {stop_distance} outside [{lo}, {d}]"
        )));
    }
    let (mut actual, truncated) = if stop_distance >= d - slack {
        (intended, false)
    } else {
        (start + (intended - start) * (stop_distance / d), true)
    };
    if let Some(&p) = config
        .positions
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != robot.0)
        .map(|(_, p)| p)
        .find(|p| p.dist(actual) <= config.eps)
    {
        actual = p;
    }
    let mut next = config.clone();
    next.positions[robot.0] = actual;
    Ok((next, MoveOutcome { start, intended, actual, stop_distance, truncated }))
}
