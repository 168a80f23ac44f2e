use serde::{Deserialize, Serialize};

use super::{RunStatus, Trace};
use crate::algorithms::{AlgorithmKind, Stage};
use crate::schedulers::FairnessLedger;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    pub n: usize,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pair: Option<f64>,
    pub bound: u64,
    pub observed: u64,
    pub pass: bool,
    pub inconclusive: bool,
}

/// Epoch (counted from 1) that contains `round`.
pub fn epoch_index(marks: &[u64], round: u64) -> u64 {
    if round == 0 {
        return 0;
    }
    1 + marks.iter().filter(|&&m| m < round).count() as u64
}

/// Epochs needed to cover `rounds`, counting afresh from the first of them.
pub fn relative_epochs<'a>(n: usize, rounds: impl IntoIterator<Item = (u64, &'a [crate::model::RobotId])>) -> u64 {
    let mut ledger = FairnessLedger::new(n, u64::MAX);
    let mut open = false;
    for (round, active) in rounds {
        open = !ledger.record(round, active);
    }
    ledger.epochs() + u64::from(open)
}

fn ceil_ratio(a: f64, b: f64) -> u64 {
    (a / b - 1e-9).ceil().max(0.0) as u64
}

/// Observed epochs spent in `stage`, summed over its maximal runs of rounds.
fn stage_epochs(trace: &Trace, stage: Stage, end: usize) -> u64 {
    let n = trace.scenario.n();
    let events = &trace.events[..end];
    let mut total = 0;
    let mut i = 0;
    while i < events.len() {
        if events[i].stage != stage {
            i += 1;
            continue;
        }
        let j = (i..events.len()).find(|&j| events[j].stage != stage).unwrap_or(events.len());
        total += relative_epochs(n, events[i..j].iter().map(|e| (e.round, e.activated.as_slice())));
        i = j;
    }
    total
}

/// Checks the epoch bounds that apply to the trace's algorithm.
pub fn verify_bound(trace: &Trace) -> Vec<BoundReport> {
    let s = &trace.scenario;
    let n = s.n();
    let delta = s.delta();
    let inconclusive = trace.status != RunStatus::Formed;
    let end = trace.formed_at.map(|f| f as usize).unwrap_or(trace.events.len());
    let observed_total = epoch_index(&trace.epoch_marks, end as u64);
    let report = |name: &str, stage: Option<Stage>, rho: Option<f64>, d: Option<f64>, bound: u64, observed: u64| {
        BoundReport {
            name: name.to_string(),
            stage,
            n,
            delta,
            rho,
            max_pair: d,
            bound,
            observed,
            pass: !inconclusive && observed <= bound,
            inconclusive,
        }
    };
    match s.resolved_algorithm() {
        AlgorithmKind::SeqPf => {
            let rho = trace.events[..end]
                .iter()
                .find(|e| e.stage != Stage::Initialization)
                .map(|e| e.sec_radius)
                .unwrap_or(trace.final_sec_radius);
            let r = ceil_ratio(rho, delta);
            let n64 = n as u64;
            let mut out = Vec::new();
            for (name, stage, bound) in [
                ("separate-one-epoch", Stage::Initialization, 1),
                ("leader-configuration", Stage::LeaderConfiguration, r + 1),
                ("partial-pattern-formation", Stage::PartialPatternFormation, 2 * n64 * r),
                ("finalization", Stage::Finalization, r),
            ] {
                out.push(report(name, Some(stage), Some(rho), None, bound, stage_epochs(trace, stage, end)));
            }
            out.push(report("seq-pf-total", None, Some(rho), None, 2 * (n64 + 1) * r + 2, observed_total));
            out
        }
        AlgorithmKind::SeqPfSmall => {
            let d = trace.events[..end]
                .iter()
                .filter(|e| e.stage != Stage::Initialization)
                .find_map(|e| e.max_pair)
                .unwrap_or(0.0);
            let r = ceil_ratio(d, delta);
            let n64 = n as u64;
            let unique_max = trace.events[..end]
                .iter()
                .enumerate()
                .filter(|(_, e)| e.stage == Stage::UniqueMaximum)
                .map(|(i, _)| i)
                .collect::<Vec<_>>();
            let first_segment = match unique_max.first() {
                Some(&a) => {
                    let b = (a..end).find(|&j| trace.events[j].stage != Stage::UniqueMaximum).unwrap_or(end);
                    relative_epochs(n, trace.events[a..b].iter().map(|e| (e.round, e.activated.as_slice())))
                }
                None => 0,
            };
            vec![
                report("separate-one-epoch", Some(Stage::Initialization), None, Some(d), 1, stage_epochs(trace, Stage::Initialization, end)),
                report("unique-maximum", Some(Stage::UniqueMaximum), None, Some(d), 1, first_segment),
                report(
                    "contraction-and-finalization",
                    None,
                    None,
                    Some(d),
                    2 * n64.saturating_sub(2) * r,
                    stage_epochs(trace, Stage::Contraction, end) + stage_epochs(trace, Stage::Finalization, end),
                ),
                report("seq-pf-small-total", None, None, Some(d), 2 * n64.saturating_sub(2) * r + 2, observed_total),
            ]
        }
        _ => Vec::new(),
    }
}
