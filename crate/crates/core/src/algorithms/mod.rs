//! Robot programs. Each maps a snapshot (plus the pattern) to a destination in
//! the observer's local frame.

mod gathering;
mod seq_pf;
mod seq_pf_small;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{smallest_enclosing_circle, Point, Tolerance};
use crate::model::{Configuration, Snapshot};

pub use gathering::{go_to_center_sec, go_to_midpoint, go_to_other, rendezvous, seq_gathering};
pub use seq_pf::{
    last, leader, occupy, overlap, rank_pattern_points, separate, seq_pf, JointConfiguration,
    PatternModel, PatternRanking, SeqPf, WalkerChoice, walker,
};
pub use seq_pf_small::{distance_deviation, seq_pf_small, SeqPfSmall};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    SeqPf,
    SeqPfSmall,
    SeqGathering,
    GoToCenterSec,
    Rendezvous,
    Auto,
    /// Baseline: never move.
    Stay,
    /// Baseline: move to the closest other occupied point.
    GoToOther,
    /// Baseline: move halfway to the closest other occupied point.
    GoToMidpoint,
}

impl AlgorithmKind {
    /// Resolves `Auto` from the pattern size.
    pub fn resolve(self, k: usize) -> AlgorithmKind {
        match self {
            AlgorithmKind::Auto if k <= 1 => AlgorithmKind::SeqGathering,
            AlgorithmKind::Auto if k <= 4 => AlgorithmKind::SeqPfSmall,
            AlgorithmKind::Auto => AlgorithmKind::SeqPf,
            other => other,
        }
    }
}

/// Which rule of a program produced a destination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Separate,
    Formed,
    Finalize,
    LeaderStay,
    LeaderToCenter,
    LeaderPlace,
    OccupyWalk,
    OccupyStay,
    EnlargeMaximum,
    ApproachEndpoint,
    PlaceSmall,
    SmallStay,
    ToMultiplicity,
    SplitMultiplicity,
    ToClosest,
    GatherStay,
    ToCenter,
    Stay,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    /// Local destination; the observer's own point means stay.
    pub destination: Point,
    pub branch: Branch,
    /// Final point of a two-leg radial detour, when the destination is its first leg.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Point>,
}

impl Decision {
    pub fn stay(snap: &Snapshot, branch: Branch) -> Self {
        Decision { destination: snap.own(), branch, target: None }
    }

    pub fn to(destination: Point, branch: Branch) -> Self {
        Decision { destination, branch, target: None }
    }

    pub fn is_stay(&self, snap: &Snapshot) -> bool {
        self.destination == snap.own()
    }
}

/// Execution stage of a configuration, independent of any observer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Initialization,
    LeaderConfiguration,
    PartialPatternFormation,
    UniqueMaximum,
    Contraction,
    Finalization,
    Gathering,
    Formed,
}

/// A robot program with its pattern preprocessed once.
#[derive(Clone, Debug)]
pub enum Program {
    SeqPf(Box<SeqPf>),
    SeqPfSmall(SeqPfSmall),
    SeqGathering,
    GoToCenterSec,
    Rendezvous,
    Stay,
    GoToOther,
    GoToMidpoint,
}

impl Program {
    pub fn new(kind: AlgorithmKind, pattern: &[Point], tol: Tolerance) -> Result<Self> {
        Ok(match kind.resolve(pattern.len()) {
            AlgorithmKind::SeqPf => Program::SeqPf(Box::new(SeqPf::new(pattern, tol)?)),
            AlgorithmKind::SeqPfSmall => Program::SeqPfSmall(SeqPfSmall::new(pattern, tol)?),
            AlgorithmKind::SeqGathering => Program::SeqGathering,
            AlgorithmKind::GoToCenterSec => Program::GoToCenterSec,
            AlgorithmKind::Rendezvous => Program::Rendezvous,
            AlgorithmKind::Stay => Program::Stay,
            AlgorithmKind::GoToOther => Program::GoToOther,
            AlgorithmKind::GoToMidpoint => Program::GoToMidpoint,
            AlgorithmKind::Auto => unreachable!("resolved above"),
        })
    }

    pub fn requires_bits(&self) -> bool {
        matches!(self, Program::SeqGathering)
    }

    pub fn decide(&self, snap: &Snapshot, tol: Tolerance) -> Result<Decision> {
        match self {
            Program::SeqPf(p) => Ok(p.decide(snap)),
            Program::SeqPfSmall(p) => Ok(p.decide(snap)),
            Program::SeqGathering => seq_gathering_decision(snap, tol),
            Program::GoToCenterSec => Ok(Decision::to(go_to_center_sec(snap, tol), Branch::ToCenter)),
            Program::Rendezvous => Ok(Decision::to(rendezvous(snap), Branch::ToClosest)),
            Program::Stay => Ok(Decision::stay(snap, Branch::Stay)),
            Program::GoToOther => Ok(Decision::to(go_to_other(snap), Branch::ToClosest)),
            Program::GoToMidpoint => Ok(Decision::to(go_to_midpoint(snap), Branch::ToClosest)),
        }
    }

    /// Stage label of a configuration, computed in the global frame.
    pub fn stage(&self, config: &Configuration) -> Stage {
        let q = config.q_points();
        match self {
            Program::SeqPf(p) => p.stage(&q),
            Program::SeqPfSmall(p) => p.stage(&q),
            _ => {
                if q.len() <= 1 {
                    Stage::Formed
                } else {
                    Stage::Gathering
                }
            }
        }
    }

    /// The placed pattern in global coordinates, when the program defines one.
    pub fn placed_pattern(&self, config: &Configuration) -> Option<Vec<Point>> {
        match self {
            Program::SeqPf(p) => p.placed_pattern_global(&config.q_points()),
            _ => None,
        }
    }

    /// The robot Procedure Occupy would move next, with its target and path.
    pub fn walker(&self, config: &Configuration) -> Option<WalkerChoice> {
        match self {
            Program::SeqPf(p) => p.walker_global(&config.q_points()),
            _ => None,
        }
    }
}

fn seq_gathering_decision(snap: &Snapshot, tol: Tolerance) -> Result<Decision> {
    let (dest, branch) = gathering::seq_gathering_branch(snap, tol)?;
    Ok(Decision::to(dest, branch))
}

/// Snapshot points re-expressed so the SEC is the unit circle at the origin.
#[derive(Clone, Debug)]
pub(crate) struct Scene {
    pub points: Vec<Point>,
    pub me: usize,
    pub center: Point,
    pub scale: f64,
}

impl Scene {
    pub fn new(points: &[Point], me: usize, tol: Tolerance) -> Option<Scene> {
        let sec = smallest_enclosing_circle(points, tol).ok()?;
        if sec.radius <= 0.0 {
            return None;
        }
        let inv = 1.0 / sec.radius;
        Some(Scene {
            points: points.iter().map(|&p| (p - sec.center) * inv).collect(),
            me,
            center: sec.center,
            scale: sec.radius,
        })
    }

    pub fn from_snapshot(snap: &Snapshot, tol: Tolerance) -> Option<Scene> {
        Scene::new(&snap.points, snap.self_index, tol)
    }

    pub fn me(&self) -> Point {
        self.points[self.me]
    }

    pub fn to_outer(&self, p: Point) -> Point {
        self.center + p * self.scale
    }

    /// Maps a normalized destination back, returning the exact own point for "stay".
    pub fn destination(&self, snap: &Snapshot, p: Point) -> Point {
        if p == self.me() {
            snap.own()
        } else {
            self.to_outer(p)
        }
    }
}

pub(crate) fn capability(msg: &str) -> Error {
    Error::Capability(msg.to_string())
}
