//! Round loop, traces, bound verification and the impossibility demos.

mod bounds;
mod demos;
pub mod generate;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algorithms::{Branch, Decision, Program, Stage};
use crate::error::Result;
use crate::geometry::{smallest_enclosing_circle, Point, Tolerance};
use crate::model::{
    apply_move, legal_interval, take_snapshot, Configuration, LocalFrame, MoveOutcome, Orientation,
    RobotId, Snapshot,
};
use crate::scenario::Scenario;
use crate::schedulers::{ActivationPolicy, FairnessLedger, MovementPolicy};

pub use bounds::{epoch_index, relative_epochs, verify_bound, BoundReport};
pub use demos::{
    demo_fsync_trap, demo_mirror_gathering, mirror_start, trap_start, Act, MirrorReport, TrapReport,
};

/// One activated robot's Look-Compute-Move in a round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub robot: RobotId,
    pub snapshot_digest: String,
    pub branch: Branch,
    pub local_destination: Point,
    pub intended: Point,
    pub outcome: MoveOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundEvent {
    pub round: u64,
    pub activated: Vec<RobotId>,
    pub actions: Vec<Action>,
    /// Stage of the configuration the round started from.
    pub stage: Stage,
    /// SEC radius at the start of the round.
    pub sec_radius: f64,
    /// Length of the unique farthest pair at the start of the round, if unique.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pair: Option<f64>,
    pub epoch_boundary: bool,
    pub epochs: u64,
    /// Distinct occupied points after the round.
    pub q_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Formed,
    Horizon,
    Running,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub scenario: Scenario,
    pub events: Vec<RoundEvent>,
    pub epoch_marks: Vec<u64>,
    /// Distinct point count before round 1, then after every round.
    pub q_count_series: Vec<usize>,
    pub formed_at: Option<u64>,
    pub status: RunStatus,
    pub final_positions: Vec<Point>,
    pub final_sec_radius: f64,
    pub hash: String,
}

impl Trace {
    pub fn epochs(&self) -> u64 {
        self.epoch_marks.len() as u64
    }

    /// Line-delimited export: a scenario record, one record per round, and a summary.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&serde_json::to_string(&serde_json::json!({
            "type": "scenario",
            "scenario": self.scenario,
        }))?);
        out.push('\n');
        for e in &self.events {
            let mut v = serde_json::to_value(e)?;
            v.as_object_mut().expect("record").insert("type".into(), "round".into());
            out.push_str(&serde_json::to_string(&v)?);
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary())?);
        out.push('\n');
        Ok(out)
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "type": "summary",
            "formed": self.status == RunStatus::Formed,
            "formed_at": self.formed_at,
            "rounds": self.events.len(),
            "epochs": self.epochs(),
            "status": self.status,
            "final_positions": self.final_positions,
            "bounds": verify_bound(self),
            "trace_hash": self.hash,
        })
    }
}

/// Hash of round records; the scenario block is excluded so replays can be compared.
pub fn hash_events(events: &[RoundEvent]) -> String {
    let mut h = Sha256::new();
    for e in events {
        h.update(serde_json::to_string(e).expect("serializable event").as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

fn snapshot_digest(s: &Snapshot) -> String {
    let bytes = serde_json::to_vec(s).expect("serializable snapshot");
    hex::encode(&Sha256::digest(&bytes)[..8])
}

/// What a robot would do if activated in the next round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub robot: RobotId,
    pub start: Point,
    pub snapshot: Snapshot,
    pub frame: LocalFrame,
    pub decision: Decision,
    pub intended: Point,
    /// Legal stop distances `[min(δ, d), d]`.
    pub interval: (f64, f64),
    /// Global polyline of the intended route; a radial detour has three vertices.
    pub path: Vec<Point>,
}

impl Plan {
    pub fn is_stay(&self) -> bool {
        self.intended == self.start
    }
}

/// Unique farthest pair length of a point set.
pub(crate) fn unique_max_pair(points: &[Point], tol: Tolerance) -> Option<f64> {
    let mut best = 0.0f64;
    for i in 0..points.len() {
        for j in 0..i {
            best = best.max(points[i].dist(points[j]));
        }
    }
    let slack = tol.eps * best.max(1.0);
    let mut count = 0;
    for i in 0..points.len() {
        for j in 0..i {
            if points[i].dist(points[j]) >= best - slack {
                count += 1;
            }
        }
    }
    (count == 1).then_some(best)
}

/// A steppable execution; `run` and the session service both drive one.
#[derive(Clone, Debug)]
pub struct Engine {
    scenario: Scenario,
    tol: Tolerance,
    program: Program,
    config: Configuration,
    frames: Vec<Orientation>,
    frame_rule: Option<fn(&Configuration, RobotId) -> Orientation>,
    ledger: FairnessLedger,
    round: u64,
    events: Vec<RoundEvent>,
    epoch_marks: Vec<u64>,
    q_series: Vec<usize>,
    formed_at: Option<u64>,
    center_mover: Option<RobotId>,
}

impl Engine {
    pub fn new(scenario: Scenario) -> Result<Engine> {
        scenario.validate()?;
        let tol = scenario.tolerance();
        let program = Program::new(scenario.algorithm, &scenario.pattern, tol)?;
        let config = Configuration::new(scenario.robots.clone(), tol)?;
        let n = scenario.n();
        let window = scenario.activation.window.unwrap_or(50 * n as u64);
        Ok(Engine {
            frames: scenario.initial_frames(),
            q_series: vec![config.distinct_count()],
            ledger: FairnessLedger::new(n, window),
            scenario,
            tol,
            program,
            config,
            frame_rule: None,
            round: 0,
            events: Vec::new(),
            epoch_marks: Vec::new(),
            formed_at: None,
            center_mover: None,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn epochs(&self) -> u64 {
        self.ledger.epochs()
    }

    pub fn ledger(&self) -> &FairnessLedger {
        &self.ledger
    }

    pub fn events(&self) -> &[RoundEvent] {
        &self.events
    }

    pub fn formed_at(&self) -> Option<u64> {
        self.formed_at
    }

    pub fn stage(&self) -> Stage {
        self.program.stage(&self.config)
    }

    /// Overrides the scenario's frames with one chosen from the configuration at each Look.
    pub fn set_frame_rule(&mut self, rule: fn(&Configuration, RobotId) -> Orientation) {
        self.frame_rule = Some(rule);
    }

    /// Re-expresses the configuration in a frame where its SEC is the unit circle at the origin.
    pub(crate) fn renormalize(&mut self) -> Result<()> {
        let pts = self.config.positions();
        let sec = smallest_enclosing_circle(pts, self.tol)?;
        if sec.radius > 0.0 {
            let moved: Vec<Point> = pts.iter().map(|&p| (p - sec.center) * (1.0 / sec.radius)).collect();
            self.config = Configuration::new(moved, self.tol)?;
        }
        Ok(())
    }

    fn frame(&self, robot: RobotId, round: u64) -> Result<LocalFrame> {
        let origin = self.config.position(robot)?;
        let o = match self.frame_rule {
            Some(rule) => rule(&self.config, robot),
            None => self.scenario.frame_at(&self.frames, robot.0, round),
        };
        Ok(LocalFrame::new(origin, o))
    }

    /// Look and Compute for `robot` against the current configuration, without moving anything.
    pub fn plan(&self, robot: RobotId) -> Result<Plan> {
        let frame = self.frame(robot, self.round + 1)?;
        let start = self.config.position(robot)?;
        let snapshot = take_snapshot(&self.config, robot, &frame, self.scenario.weak_detection)?;
        let decision = self.program.decide(&snapshot, self.tol)?;
        let intended = if decision.is_stay(&snapshot) {
            start
        } else {
            let g = frame.to_global(decision.destination);
            if g.dist(start) <= self.tol.eps {
                start
            } else {
                g
            }
        };
        let mut path = vec![start];
        if intended != start {
            path.push(intended);
            if let Some(t) = decision.target {
                path.push(frame.to_global(t));
            }
        }
        Ok(Plan {
            robot,
            start,
            interval: legal_interval(start, intended, self.scenario.delta()),
            snapshot,
            frame,
            decision,
            intended,
            path,
        })
    }

    pub fn is_formed(&self) -> bool {
        let q = self.config.q_points();
        if self.scenario.k() == 1 {
            return q.len() == 1;
        }
        q.len() == self.scenario.k() && crate::geometry::is_similar(&q, &self.scenario.pattern, self.tol)
    }

    /// Formed, and every robot's Compute says stay.
    pub fn formed_and_quiescent(&self) -> Result<bool> {
        if !self.is_formed() {
            return Ok(false);
        }
        for r in self.config.robot_ids() {
            if !self.plan(r)?.is_stay() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Executes one round: every activated robot looks at the start-of-round
    /// configuration, then all moves are applied.
    pub fn step(
        &mut self,
        activated: &[RobotId],
        mut stop: impl FnMut(&Plan) -> Result<f64>,
    ) -> Result<&RoundEvent> {
        let round = self.round + 1;
        let stage = self.stage();
        let q = self.config.q_points();
        let sec_radius = smallest_enclosing_circle(&q, self.tol).map(|c| c.radius).unwrap_or(0.0);
        let max_pair = unique_max_pair(&q, self.tol);
        let plans: Vec<Plan> = activated.iter().map(|&r| self.plan(r)).collect::<Result<_>>()?;
        let mut next = self.config.clone();
        let mut actions = Vec::with_capacity(plans.len());
        let mut warnings = Vec::new();
        for plan in &plans {
            // Asked even for stays, so scripted truncations stay aligned with activations.
            let s = stop(plan)?;
            let s = if plan.is_stay() { 0.0 } else { s };
            let (c, outcome) = apply_move(&next, plan.robot, plan.intended, s, self.scenario.delta())?;
            next = c;
            if plan.decision.branch == Branch::LeaderToCenter {
                if let Some(prev) = self.center_mover.filter(|&p| p != plan.robot) {
                    if self.config.position(prev)? != plan.intended {
                        warnings.push(format!(
                            "robots {prev} and {} are both heading for the SEC center",
                            plan.robot
                        ));
                    }
                }
                self.center_mover = Some(plan.robot);
            }
            actions.push(Action {
                robot: plan.robot,
                snapshot_digest: snapshot_digest(&plan.snapshot),
                branch: plan.decision.branch,
                local_destination: plan.decision.destination,
                intended: plan.intended,
                outcome,
            });
        }
        self.config = next;
        self.round = round;
        let boundary = self.ledger.record(round, activated);
        if boundary {
            self.epoch_marks.push(round);
        }
        let q_count = self.config.distinct_count();
        self.q_series.push(q_count);
        self.events.push(RoundEvent {
            round,
            activated: activated.to_vec(),
            actions,
            stage,
            sec_radius,
            max_pair,
            epoch_boundary: boundary,
            epochs: self.ledger.epochs(),
            q_count,
            warnings,
        });
        Ok(self.events.last().expect("just pushed"))
    }

    /// Records formation at the current round if the configuration is formed and quiescent.
    pub fn check_formed(&mut self) -> Result<bool> {
        if self.formed_at.is_some() {
            return Ok(true);
        }
        if self.formed_and_quiescent()? {
            self.formed_at = Some(self.round);
            return Ok(true);
        }
        Ok(false)
    }

    pub fn trace(&self) -> Trace {
        let status = if self.formed_at.is_some() {
            RunStatus::Formed
        } else if self.round >= self.scenario.max_rounds() {
            RunStatus::Horizon
        } else {
            RunStatus::Running
        };
        let q = self.config.q_points();
        Trace {
            scenario: self.scenario.clone(),
            events: self.events.clone(),
            epoch_marks: self.epoch_marks.clone(),
            q_count_series: self.q_series.clone(),
            formed_at: self.formed_at,
            status,
            final_positions: self.config.positions().to_vec(),
            final_sec_radius: smallest_enclosing_circle(&q, self.tol).map(|c| c.radius).unwrap_or(0.0),
            hash: hash_events(&self.events),
        }
    }
}

/// Runs a scenario to formation or its round horizon.
pub fn run(scenario: &Scenario) -> Result<Trace> {
    let mut engine = Engine::new(scenario.clone())?;
    let mut activation = ActivationPolicy::new(&scenario.activation, scenario.seed);
    let mut movement = MovementPolicy::new(&scenario.movement, scenario.seed);
    let n = scenario.n();
    let horizon = scenario.max_rounds();
    while !engine.check_formed()? && engine.round() < horizon {
        let active = activation.next_activation(engine.round() + 1, n, engine.ledger())?;
        engine.step(&active, |p| movement.decide_truncation(p.start, p.intended))?;
    }
    Ok(engine.trace())
}

/// SEC radius of the first configuration outside Initialization, found by a dry run.
pub fn rho_after_initialization(scenario: &Scenario, max_rounds: u64) -> Result<Option<f64>> {
    let mut engine = Engine::new(scenario.clone())?;
    let mut activation = ActivationPolicy::new(&scenario.activation, scenario.seed);
    let mut movement = MovementPolicy::new(&scenario.movement, scenario.seed);
    let n = scenario.n();
    while engine.round() < max_rounds {
        if engine.stage() != Stage::Initialization {
            let q = engine.config().q_points();
            return Ok(Some(smallest_enclosing_circle(&q, engine.tol)?.radius));
        }
        let active = activation.next_activation(engine.round() + 1, n, engine.ledger())?;
        engine.step(&active, |p| movement.decide_truncation(p.start, p.intended))?;
    }
    Ok(None)
}

pub fn check_formed_and_quiescent(config: &Configuration, scenario: &Scenario) -> Result<bool> {
    let mut s = scenario.clone();
    s.robots = config.positions().to_vec();
    Engine::new(s)?.formed_and_quiescent()
}
