//! Random scenario families for batch campaigns and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rho_after_initialization, run, verify_bound, RunStatus, Trace};
use crate::algorithms::AlgorithmKind;
use crate::error::{usage, Result};
use crate::geometry::{smallest_enclosing_circle, Point, Tolerance};
use crate::scenario::{FrameMode, FramesSpec, Scenario};
use crate::schedulers::{ActivationKind, ActivationSpec, MovementKind, MovementSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    SeqPf,
    SeqPfSmall,
    SeqGathering,
    Rendezvous,
}

fn default_count() -> usize {
    1
}

fn default_fraction() -> f64 {
    0.05
}

fn default_frames() -> FrameMode {
    FrameMode::Random
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub family: Family,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Inclusive robot-count range.
    pub n: [usize; 2],
    /// Inclusive pattern-size range; ignored by the gathering families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<[usize; 2]>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activation: Option<ActivationKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub movement: Option<MovementKind>,
    /// δ as a fraction of the initial SEC radius.
    #[serde(default = "default_fraction")]
    pub delta_fraction: f64,
    #[serde(default = "default_frames")]
    pub frames: FrameMode,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchSpec {
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
}

/// `k` pattern points in the unit disk, pairwise at least 0.1 apart.
pub fn random_pattern(rng: &mut impl Rng, k: usize) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::with_capacity(k);
    while pts.len() < k {
        let p = Point::polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        if pts.iter().all(|q| q.dist(p) >= 0.1) {
            pts.push(p);
        }
    }
    pts
}

/// `n` robots on a random number (at least `min_sites`) of distinct sites, so multiplicities are common.
pub fn random_start(rng: &mut impl Rng, n: usize, min_sites: usize) -> Vec<Point> {
    let sites_n = rng.gen_range(min_sites.clamp(1, n)..=n);
    let scale = rng.gen_range(0.5..5.0);
    let sites = random_pattern(rng, sites_n);
    let mut robots: Vec<Point> = sites.iter().map(|&p| p * scale).collect();
    while robots.len() < n {
        robots.push(sites[rng.gen_range(0..sites_n)] * scale);
    }
    robots
}

fn rho_of(points: &[Point]) -> f64 {
    match smallest_enclosing_circle(points, Tolerance::default()) {
        Ok(c) if c.radius > 1e-9 => c.radius,
        _ => 1.0,
    }
}

/// One scenario of `family` drawn from `seed`.
pub fn scenario_for(family: Family, n_range: [usize; 2], k_range: Option<[usize; 2]>, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (algorithm, k_default, activation, movement, weak) = match family {
        Family::SeqPf => (AlgorithmKind::SeqPf, [5, 10], ActivationKind::SeqRoundRobin, MovementKind::WorstCaseDelta, false),
        Family::SeqPfSmall => {
            (AlgorithmKind::SeqPfSmall, [2, 4], ActivationKind::SeqRoundRobin, MovementKind::WorstCaseDelta, false)
        }
        Family::SeqGathering => {
            (AlgorithmKind::SeqGathering, [1, 1], ActivationKind::SeqRandom, MovementKind::Random, true)
        }
        Family::Rendezvous => {
            (AlgorithmKind::Rendezvous, [1, 1], ActivationKind::SeqRoundRobin, MovementKind::WorstCaseDelta, false)
        }
    };
    let [klo, khi] = k_range.unwrap_or(k_default);
    let k = rng.gen_range(klo..=khi);
    let [nlo, nhi] = n_range;
    let n = rng.gen_range(nlo.max(k)..=nhi.max(k));
    let pattern = if k == 1 { vec![Point::ORIGIN] } else { random_pattern(&mut rng, k) };
    // A fully gathered start leaves the post-Initialization radius proportional to δ.
    let min_sites = if family == Family::SeqPfSmall { 1 } else { 2 };
    let robots = random_start(&mut rng, n, min_sites);
    let delta = rho_of(&robots) * default_fraction();
    let mut s = Scenario {
        robots,
        frames: FramesSpec::Mode(FrameMode::Random),
        pattern,
        algorithm,
        activation: ActivationSpec { kind: activation, seed: Some(seed), script: None, window: None },
        movement: MovementSpec { kind: movement, delta, seed: Some(seed), script: None },
        weak_detection: weak,
        eps: Tolerance::default().eps,
        max_rounds: None,
        seed,
    };
    calibrate_delta(&mut s, default_fraction());
    s
}

/// Sets δ to `fraction` of the SEC radius: measured after Initialization for
/// SeqPF, at the start otherwise.
pub fn calibrate_delta(s: &mut Scenario, fraction: f64) {
    s.movement.delta = rho_of(&s.robots) * fraction;
    if s.resolved_algorithm() == AlgorithmKind::SeqPf {
        let horizon = 10 * s.n() as u64;
        if let Ok(Some(rho)) = rho_after_initialization(s, horizon) {
            if rho > 0.0 {
                s.movement.delta = rho * fraction;
            }
        }
    }
}

impl GeneratorSpec {
    pub fn scenarios(&self) -> Vec<(String, Scenario)> {
        (0..self.count)
            .map(|i| {
                let seed = self.seed.wrapping_add(i as u64);
                let mut s = scenario_for(self.family, self.n, self.k, seed);
                if let Some(a) = self.activation {
                    s.activation.kind = a;
                }
                if let Some(m) = self.movement {
                    s.movement.kind = m;
                }
                s.frames = FramesSpec::Mode(self.frames);
                calibrate_delta(&mut s, self.delta_fraction);
                // Separation can stretch the SEC by up to the largest frame unit.
                s.max_rounds = Some(10 * s.default_max_rounds());
                (format!("{:?}-{seed}", self.family).to_lowercase(), s)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub id: String,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub status: String,
    pub formed_at: Option<u64>,
    pub epochs: Option<u64>,
    pub bound: Option<u64>,
    pub margin: Option<i64>,
    pub pass: bool,
    pub error: Option<String>,
}

impl BatchRow {
    pub const HEADER: &'static str = "id,n,k,seed,status,formed_at,epochs,bound,margin,pass,error";

    pub fn csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.id,
            self.n,
            self.k,
            self.seed,
            self.status,
            opt(self.formed_at.map(|v| v.to_string())),
            opt(self.epochs.map(|v| v.to_string())),
            opt(self.bound.map(|v| v.to_string())),
            opt(self.margin.map(|v| v.to_string())),
            self.pass,
            opt(self.error.as_ref().map(|e| format!("\"{}\"", e.replace('"', "'")))),
        )
    }
}

/// Summarises one run: the total-epoch bound decides `pass` when the algorithm has one.
pub fn row_for(id: &str, scenario: &Scenario, result: &Result<Trace>) -> BatchRow {
    let mut row = BatchRow {
        id: id.to_string(),
        n: scenario.n(),
        k: scenario.k(),
        seed: scenario.seed,
        status: "error".into(),
        formed_at: None,
        epochs: None,
        bound: None,
        margin: None,
        pass: false,
        error: None,
    };
    match result {
        Err(e) => row.error = Some(e.to_string()),
        Ok(t) => {
            row.status = match t.status {
                RunStatus::Formed => "formed",
                RunStatus::Horizon => "horizon",
                RunStatus::Running => "running",
            }
            .into();
            row.formed_at = t.formed_at;
            let reports = verify_bound(t);
            let all_pass = reports.iter().all(|r| r.pass);
            if let Some(total) = reports.last() {
                row.epochs = Some(total.observed);
                row.bound = Some(total.bound);
                row.margin = Some(total.bound as i64 - total.observed as i64);
            } else {
                row.epochs = Some(super::epoch_index(&t.epoch_marks, t.formed_at.unwrap_or(t.events.len() as u64)));
            }
            row.pass = t.status == RunStatus::Formed && all_pass;
        }
    }
    row
}

/// Runs every generated scenario on a pool of `jobs` workers.
pub fn run_batch(spec: &BatchSpec, jobs: usize) -> Result<Vec<BatchRow>> {
    let scenarios: Vec<(String, Scenario)> = spec.generators.iter().flat_map(|g| g.scenarios()).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        scenarios
            .par_iter()
            .map(|(id, s)| row_for(id, s, &run(s)))
            .collect()
    }))
}
