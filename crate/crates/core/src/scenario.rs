//! Scenario documents: the JSON schema shared by the CLI, batch runner and session API.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algorithms::{AlgorithmKind, Program};
use crate::error::{Error, Result};
use crate::geometry::{check_finite, smallest_enclosing_circle, Point, Tolerance};
use crate::model::Orientation;
use crate::schedulers::{ActivationKind, ActivationSpec, MovementSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameMode {
    /// One random frame per robot, fixed for the run.
    Random,
    /// A fresh random frame at every activation.
    RandomPerActivation,
    /// Every robot uses the global orientation and unit.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FramesSpec {
    Mode(FrameMode),
    Explicit(Vec<Orientation>),
}

impl Default for FramesSpec {
    fn default() -> Self {
        FramesSpec::Mode(FrameMode::Random)
    }
}

fn default_algorithm() -> AlgorithmKind {
    AlgorithmKind::Auto
}

fn default_eps() -> f64 {
    1e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub robots: Vec<Point>,
    #[serde(default)]
    pub frames: FramesSpec,
    pub pattern: Vec<Point>,
    #[serde(default = "default_algorithm")]
    pub algorithm: AlgorithmKind,
    pub activation: ActivationSpec,
    pub movement: MovementSpec,
    #[serde(default)]
    pub weak_detection: bool,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

/// Parses a scenario document, reporting schema errors with their key path.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        let s = parse_scenario(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance { eps: self.eps }
    }

    pub fn n(&self) -> usize {
        self.robots.len()
    }

    pub fn k(&self) -> usize {
        self.pattern.len()
    }

    pub fn delta(&self) -> f64 {
        self.movement.delta
    }

    pub fn resolved_algorithm(&self) -> AlgorithmKind {
        self.algorithm.resolve(self.k())
    }

    /// Checks every model assumption; a valid scenario can be run.
    pub fn validate(&self) -> Result<()> {
        if self.robots.is_empty() {
            return Err(Error::Model("no robots".into()));
        }
        if self.pattern.is_empty() {
            return Err(Error::Model("empty pattern".into()));
        }
        check_finite(&self.robots).map_err(|_| Error::Model("robot coordinates must be finite".into()))?;
        check_finite(&self.pattern).map_err(|_| Error::Model("pattern coordinates must be finite".into()))?;
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::Model(format!("eps must be positive, got {}", self.eps)));
        }
        if self.robots.len() < self.pattern.len() {
            return Err(Error::Model(format!(
                "{} robots cannot form a pattern of {} points: there must be at least as many robots as pattern points",
                self.robots.len(),
                self.pattern.len()
            )));
        }
        let delta = self.movement.delta;
        if !(delta.is_finite() && delta > 4.0 * self.eps) {
            return Err(Error::Model(format!("delta {delta} must exceed 4 * eps = {}", 4.0 * self.eps)));
        }
        for i in 0..self.pattern.len() {
            for j in 0..i {
                if self.pattern[i].dist(self.pattern[j]) <= self.eps {
                    return Err(Error::Model(format!("pattern points {j} and {i} coincide")));
                }
            }
        }
        if let FramesSpec::Explicit(frames) = &self.frames {
            if frames.len() != self.robots.len() {
                return Err(Error::Model(format!(
                    "{} frames given for {} robots",
                    frames.len(),
                    self.robots.len()
                )));
            }
            frames.iter().try_for_each(Orientation::validate)?;
        }
        if let Some(script) = &self.activation.script {
            if let Some(r) = script.iter().find(|&&r| r >= self.robots.len()) {
                return Err(Error::Model(format!("activation script names robot {r} of {}", self.n())));
            }
        }
        if let Some(script) = &self.movement.script {
            if script.iter().any(|f| !(0.0..=1.0).contains(f)) {
                return Err(Error::Model("movement script fractions must lie in [0, 1]".into()));
            }
        }
        let program = Program::new(self.algorithm, &self.pattern, self.tolerance()).map_err(|e| match e {
            Error::Usage(m) => Error::Model(m),
            other => other,
        })?;
        if program.requires_bits() && !self.weak_detection {
            return Err(Error::Capability(
                "seq-gathering needs weak multiplicity detection (set weak_detection)".into(),
            ));
        }
        Ok(())
    }

    /// Radius of the initial smallest enclosing circle, or 1 for a gathered start.
    pub fn initial_rho(&self) -> f64 {
        match smallest_enclosing_circle(&self.robots, self.tolerance()) {
            Ok(c) if c.radius > self.eps => c.radius,
            _ => 1.0,
        }
    }

    pub fn default_max_rounds(&self) -> u64 {
        let n = self.n() as u64;
        let ratio = (self.initial_rho() / self.delta()).ceil().max(1.0) as u64;
        10 * n * (2 * (n + 1) * ratio + 2)
    }

    pub fn max_rounds(&self) -> u64 {
        self.max_rounds.unwrap_or_else(|| self.default_max_rounds())
    }

    /// Replaces the run seed with `OBLOT_SEED` when that variable holds an integer.
    pub fn apply_env_seed(&mut self) {
        if let Some(seed) = std::env::var("OBLOT_SEED").ok().and_then(|v| v.trim().parse().ok()) {
            self.seed = seed;
        }
    }

    pub fn is_interactive(&self) -> bool {
        self.activation.kind == ActivationKind::Interactive
    }

    /// Orientation of every robot for frame modes fixed for the whole run.
    pub fn initial_frames(&self) -> Vec<Orientation> {
        match &self.frames {
            FramesSpec::Explicit(f) => f.clone(),
            FramesSpec::Mode(FrameMode::Identity) => vec![Orientation::IDENTITY; self.n()],
            FramesSpec::Mode(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0xF4A3_E500);
                let rho = self.initial_rho();
                (0..self.n()).map(|_| random_orientation(&mut rng, rho)).collect()
            }
        }
    }

    /// Orientation used by `robot` when activated in `round`.
    pub fn frame_at(&self, base: &[Orientation], robot: usize, round: u64) -> Orientation {
        match &self.frames {
            FramesSpec::Mode(FrameMode::RandomPerActivation) => {
                let mix = self.seed ^ round.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (robot as u64).rotate_left(32);
                random_orientation(&mut ChaCha8Rng::seed_from_u64(mix), self.initial_rho())
            }
            _ => base[robot],
        }
    }
}

/// Rotation uniform in `[0, 2π)`, either handedness, unit uniform in `[0.1ρ, 10ρ]`.
pub fn random_orientation(rng: &mut impl Rng, rho: f64) -> Orientation {
    Orientation {
        rotation: rng.gen_range(0.0..std::f64::consts::TAU),
        handedness: if rng.gen_bool(0.5) { 1 } else { -1 },
        unit: rng.gen_range(0.1 * rho..=10.0 * rho),
    }
}
