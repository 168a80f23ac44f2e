//! Activation and movement adversaries with fairness accounting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::geometry::Point;
use crate::model::RobotId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationKind {
    Fsync,
    SsyncRandom,
    SeqRandom,
    SeqRoundRobin,
    Scripted,
    Interactive,
}

impl ActivationKind {
    pub fn is_sequential(self) -> bool {
        !matches!(self, ActivationKind::Fsync | ActivationKind::SsyncRandom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivationSpec {
    pub kind: ActivationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MovementKind {
    Rigid,
    WorstCaseDelta,
    Random,
    Scripted,
    Interactive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovementSpec {
    pub kind: MovementKind,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Stop fractions consumed one per activation by the scripted policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<Vec<f64>>,
}

/// Per-robot activation history and epoch counter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairnessLedger {
    pub last_activation_round: Vec<Option<u64>>,
    pub window: u64,
    pending: Vec<bool>,
    epochs: u64,
}

impl FairnessLedger {
    pub fn new(n: usize, window: u64) -> Self {
        FairnessLedger {
            last_activation_round: vec![None; n],
            window: window.max(1),
            pending: vec![true; n],
            epochs: 0,
        }
    }

    /// Records one round; true when it completes an epoch.
    pub fn record(&mut self, round: u64, activated: &[RobotId]) -> bool {
        for r in activated {
            self.last_activation_round[r.0] = Some(round);
            self.pending[r.0] = false;
        }
        if self.pending.iter().any(|p| *p) {
            return false;
        }
        self.epochs += 1;
        self.pending.iter_mut().for_each(|p| *p = true);
        true
    }

    pub fn epochs(&self) -> u64 {
        self.epochs
    }

    /// Rounds before `round` during which `robot` was idle.
    pub fn idle(&self, robot: RobotId, round: u64) -> u64 {
        (round - 1).saturating_sub(self.last_activation_round[robot.0].unwrap_or(0))
    }

    /// All robots idle for at least `window` rounds, most starved first.
    pub fn starved(&self, round: u64) -> Vec<RobotId> {
        let mut v: Vec<RobotId> = (0..self.pending.len())
            .map(RobotId)
            .filter(|&r| self.idle(r, round) >= self.window)
            .collect();
        v.sort_by_key(|&r| (std::cmp::Reverse(self.idle(r, round)), r));
        v
    }
}

/// Whether `round` closes an epoch; also returns the epoch count.
pub fn epoch_boundary(ledger: &mut FairnessLedger, round: u64, activated: &[RobotId]) -> (bool, u64) {
    let b = ledger.record(round, activated);
    (b, ledger.epochs())
}

pub struct ActivationPolicy {
    kind: ActivationKind,
    rng: ChaCha8Rng,
    script: Vec<usize>,
    cursor: usize,
    next_rr: usize,
}

impl ActivationPolicy {
    pub fn new(spec: &ActivationSpec, seed: u64) -> Self {
        ActivationPolicy {
            kind: spec.kind,
            rng: ChaCha8Rng::seed_from_u64(spec.seed.unwrap_or(seed) ^ 0xA11C_E5ED),
            script: spec.script.clone().unwrap_or_default(),
            cursor: 0,
            next_rr: 0,
        }
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }

    fn round_robin(&mut self, n: usize) -> RobotId {
        let r = RobotId(self.next_rr % n);
        self.next_rr = (self.next_rr + 1) % n;
        r
    }

    /// Robots activated in `round`. The caller records the result in the ledger.
    pub fn next_activation(&mut self, round: u64, n: usize, ledger: &FairnessLedger) -> Result<Vec<RobotId>> {
        if n == 0 {
            return Err(usage("no robots to activate"));
        }
        Ok(match self.kind {
            ActivationKind::Fsync => (0..n).map(RobotId).collect(),
            ActivationKind::SeqRoundRobin => vec![self.round_robin(n)],
            ActivationKind::SeqRandom => match ledger.starved(round).first() {
                Some(&r) => vec![r],
                None => vec![RobotId(self.rng.gen_range(0..n))],
            },
            ActivationKind::SsyncRandom => {
                let mut set: Vec<bool> = loop {
                    let s: Vec<bool> = (0..n).map(|_| self.rng.gen_bool(0.5)).collect();
                    if s.iter().any(|b| *b) {
                        break s;
                    }
                };
                for r in ledger.starved(round) {
                    set[r.0] = true;
                }
                (0..n).filter(|&i| set[i]).map(RobotId).collect()
            }
            ActivationKind::Scripted => {
                if self.cursor < self.script.len() {
                    let r = self.script[self.cursor];
                    self.cursor += 1;
                    if r >= n {
                        return Err(usage(format!("scripted activation names robot {r} of {n}")));
                    }
                    vec![RobotId(r)]
                } else {
                    vec![self.round_robin(n)]
                }
            }
            ActivationKind::Interactive => {
                return Err(usage("interactive activation is driven through a session"))
            }
        })
    }
}

pub struct MovementPolicy {
    kind: MovementKind,
    delta: f64,
    rng: ChaCha8Rng,
    script: Vec<f64>,
    cursor: usize,
}

/// Stop distance for a requested fraction of the intended distance, clamped by the δ floor.
pub fn stop_for_fraction(fraction: f64, d: f64, delta: f64) -> f64 {
    let f = fraction.clamp(0.0, 1.0);
    (f * d).max(delta.min(d)).min(d)
}

impl MovementPolicy {
    pub fn new(spec: &MovementSpec, seed: u64) -> Self {
        MovementPolicy {
            kind: spec.kind,
            delta: spec.delta,
            rng: ChaCha8Rng::seed_from_u64(spec.seed.unwrap_or(seed) ^ 0x0DE1_7A00),
            script: spec.script.clone().unwrap_or_default(),
            cursor: 0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Stop distance in `[min(δ, d)`, `d]` for one activation.
    pub fn decide_truncation(&mut self, start: Point, intended: Point) -> Result<f64> {
        let d = start.dist(intended);
        let scripted = if self.kind == MovementKind::Scripted {
            let f = self.script.get(self.cursor).copied().unwrap_or(1.0);
            self.cursor += 1;
            Some(f)
        } else {
            None
        };
        if d == 0.0 {
            return Ok(0.0);
        }
        Ok(match self.kind {
            MovementKind::Rigid => d,
            MovementKind::WorstCaseDelta => self.delta.min(d),
            MovementKind::Random => {
                if d <= self.delta {
                    d
                } else {
                    self.rng.gen_range(self.delta..=d)
                }
            }
            MovementKind::Scripted => stop_for_fraction(scripted.unwrap_or(1.0), d, self.delta),
            MovementKind::Interactive => {
                return Err(usage("interactive truncation is driven through a session"))
            }
        })
    }
}
