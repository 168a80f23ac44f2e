//! Interactive sessions: a human adversary picks the activated robot and its truncation.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algorithms::{AlgorithmKind, Branch, Stage, WalkerChoice};
use crate::engine::{Engine, RoundEvent};
use crate::error::Error;
use crate::geometry::{leader_angular_sequence, smallest_enclosing_circle, Chirality, Circle, Point};
use crate::model::{CensusEntry, RobotId};
use crate::scenario::{parse_scenario, Scenario};
use crate::schedulers::{stop_for_fraction, ActivationKind, MovementKind};

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("no session {0}")]
    UnknownSession(String),
    #[error("no robot {robot} in a session of {n}")]
    UnknownRobot { robot: usize, n: usize },
    #[error("session is formed and quiescent")]
    Finished,
    #[error("fairness window exceeded: robot {forced} must be activated next")]
    Forced { forced: usize },
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Core(#[from] Error),
}

pub type SessionResult<T> = std::result::Result<T, SessionError>;

/// Leader angular sequence of the current configuration, if one exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaStatus {
    pub defined: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_point: Option<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_point: Option<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Chirality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairnessStatus {
    pub window: u64,
    /// Rounds each robot has been idle before the next round.
    pub idle: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forced_robot: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: String,
    pub round: u64,
    pub epochs: u64,
    pub algorithm: AlgorithmKind,
    pub delta: f64,
    pub stage: Stage,
    pub formed: bool,
    pub quiescent: bool,
    pub robots: Vec<Point>,
    pub census: Vec<CensusEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sec: Option<Circle>,
    pub lambda: LambdaStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub placed_pattern: Option<Vec<Point>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walker: Option<WalkerChoice>,
    pub fairness: FairnessStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preview {
    pub robot: usize,
    pub start: Point,
    pub destination: Point,
    pub distance: f64,
    /// Legal stop distances `[min(δ, d), d]`.
    pub interval: [f64; 2],
    pub branch: Branch,
    pub path: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRequest {
    pub robot: usize,
    pub stop_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepResponse {
    pub state: SessionState,
    pub event: RoundEvent,
}

pub struct Session {
    id: String,
    engine: Engine,
    touched: Mutex<Instant>,
}

impl Session {
    /// Builds a session; scheduler kinds are coerced to interactive.
    pub fn new(id: String, mut scenario: Scenario) -> SessionResult<Session> {
        scenario.activation.kind = ActivationKind::Interactive;
        scenario.movement.kind = MovementKind::Interactive;
        let mut engine = Engine::new(scenario)?;
        engine.check_formed()?;
        Ok(Session { id, engine, touched: Mutex::new(Instant::now()) })
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    fn touch(&self) {
        *self.touched.lock().expect("clock poisoned") = Instant::now();
    }

    fn idle_for(&self) -> Duration {
        self.touched.lock().map(|t| t.elapsed()).unwrap_or(Duration::MAX)
    }

    fn robot(&self, robot: usize) -> SessionResult<RobotId> {
        let n = self.engine.scenario().n();
        if robot >= n {
            return Err(SessionError::UnknownRobot { robot, n });
        }
        Ok(RobotId(robot))
    }

    fn forced(&self) -> Option<usize> {
        self.engine.ledger().starved(self.engine.round() + 1).first().map(|r| r.0)
    }

    pub fn state(&self) -> SessionResult<SessionState> {
        let e = &self.engine;
        let config = e.config();
        let tol = e.scenario().tolerance();
        let q = config.q_points();
        let lambda = match leader_angular_sequence(&q, None, tol) {
            Some(l) => LambdaStatus {
                defined: true,
                inner_point: Some(l.inner_point),
                boundary_point: Some(l.boundary_point),
                orientation: Some(l.orientation),
                theta1: Some(l.theta1()),
            },
            None => LambdaStatus { defined: false, inner_point: None, boundary_point: None, orientation: None, theta1: None },
        };
        let next = e.round() + 1;
        let formed = e.is_formed();
        Ok(SessionState {
            id: self.id.clone(),
            round: e.round(),
            epochs: e.epochs(),
            algorithm: e.scenario().resolved_algorithm(),
            delta: e.scenario().delta(),
            stage: e.stage(),
            formed,
            quiescent: formed && e.formed_and_quiescent()?,
            robots: config.positions().to_vec(),
            census: config.census(),
            sec: smallest_enclosing_circle(&q, tol).ok(),
            lambda,
            placed_pattern: e.program().placed_pattern(config),
            walker: e.program().walker(config),
            fairness: FairnessStatus {
                window: e.ledger().window,
                idle: config.robot_ids().map(|r| e.ledger().idle(r, next)).collect(),
                forced_robot: self.forced(),
            },
        })
    }

    pub fn what_if(&self, robot: usize) -> SessionResult<Preview> {
        let plan = self.engine.plan(self.robot(robot)?)?;
        let d = plan.start.dist(plan.intended);
        Ok(Preview {
            robot,
            start: plan.start,
            destination: plan.intended,
            distance: d,
            interval: [plan.interval.0, plan.interval.1],
            branch: plan.decision.branch,
            path: plan.path,
        })
    }

    /// One sequential round with stop distance `max(min(δ, d), stop_fraction · d)`.
    pub fn step(&mut self, req: &StepRequest) -> SessionResult<StepResponse> {
        let robot = self.robot(req.robot)?;
        if !(0.0..=1.0).contains(&req.stop_fraction) {
            return Err(SessionError::BadRequest(format!(
                "stop_fraction must lie in [0, 1], got {}",
                req.stop_fraction
            )));
        }
        if self.engine.formed_at().is_some() {
            return Err(SessionError::Finished);
        }
        if let Some(forced) = self.forced().filter(|&f| f != req.robot) {
            return Err(SessionError::Forced { forced });
        }
        let delta = self.engine.scenario().delta();
        let event = self
            .engine
            .step(&[robot], |p| Ok(stop_for_fraction(req.stop_fraction, p.start.dist(p.intended), delta)))?
            .clone();
        self.engine.check_formed()?;
        Ok(StepResponse { state: self.state()?, event })
    }

    /// Line-delimited trace, the same records the CLI writes.
    pub fn trace_jsonl(&self) -> SessionResult<String> {
        Ok(self.engine.trace().to_jsonl()?)
    }
}

/// In-memory sessions with idle expiry.
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<RwLock<Session>>>>,
    ttl: Duration,
    counter: AtomicU64,
}

impl Default for SessionStore {
    fn default() -> Self {
        SessionStore::new(Duration::from_secs(3600))
    }
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        SessionStore { sessions: RwLock::new(HashMap::new()), ttl, counter: AtomicU64::new(0) }
    }

    fn fresh_id(&self) -> String {
        let c = self.counter.fetch_add(1, Ordering::Relaxed);
        let nanos = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0);
        let digest = Sha256::digest(format!("{c}:{nanos}:{}", std::process::id()).as_bytes());
        hex::encode(&digest[..12])
    }

    fn purge(&self) {
        let ttl = self.ttl;
        let mut map = self.sessions.write().expect("session map poisoned");
        map.retain(|_, s| s.read().map(|s| s.idle_for() < ttl).unwrap_or(false));
    }

    /// Parses and validates a scenario document, then registers a session for it.
    pub fn create(&self, body: &str) -> SessionResult<SessionState> {
        self.purge();
        let scenario = parse_scenario(body)?;
        scenario.validate()?;
        let id = self.fresh_id();
        let session = Session::new(id.clone(), scenario)?;
        let state = session.state()?;
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id, Arc::new(RwLock::new(session)));
        Ok(state)
    }

    fn get(&self, id: &str) -> SessionResult<Arc<RwLock<Session>>> {
        self.purge();
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    /// Runs `f` with shared access; previews and state reads may overlap.
    pub fn read<T>(&self, id: &str, f: impl FnOnce(&Session) -> SessionResult<T>) -> SessionResult<T> {
        let s = self.get(id)?;
        let guard = s.read().expect("session poisoned");
        guard.touch();
        f(&guard)
    }

    /// Runs `f` with exclusive access, so steps on one session are serialized.
    pub fn write<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> SessionResult<T>) -> SessionResult<T> {
        let s = self.get(id)?;
        let mut guard = s.write().expect("session poisoned");
        guard.touch();
        f(&mut guard)
    }

    pub fn delete(&self, id: &str) -> SessionResult<()> {
        self.sessions
            .write()
            .expect("session map poisoned")
            .remove(id)
            .map(|_| ())
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BODY: &str = r#"{
        "robots": [[0,0],[1,0],[0,1]],
        "pattern": [[0,0]],
        "algorithm": "seq-gathering",
        "frames": "identity",
        "activation": {"kind": "seq-round-robin"},
        "movement": {"kind": "rigid", "delta": 0.01},
        "weak_detection": true
    }"#;

    #[test]
    fn preview_is_idempotent_and_matches_step() {
        let store = SessionStore::default();
        let id = store.create(BODY).unwrap().id;
        let a = store.read(&id, |s| s.what_if(1)).unwrap();
        let b = store.read(&id, |s| s.what_if(1)).unwrap();
        assert_eq!(a, b);
        let r = store.write(&id, |s| s.step(&StepRequest { robot: 1, stop_fraction: 1.0 })).unwrap();
        assert_eq!(r.event.actions[0].intended, a.destination);
        assert_eq!(r.state.round, 1);
    }

    #[test]
    fn expired_sessions_vanish() {
        let store = SessionStore::new(Duration::from_millis(0));
        let id = store.create(BODY).unwrap().id;
        std::thread::sleep(Duration::from_millis(2));
        assert!(matches!(store.read(&id, |s| s.state()), Err(SessionError::UnknownSession(_))));
    }
}
