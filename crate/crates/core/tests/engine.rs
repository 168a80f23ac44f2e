mod common;

use std::f64::consts::TAU;

use oblot::algorithms::{AlgorithmKind, Stage};
use oblot::engine::generate::{calibrate_delta, scenario_for, Family};
use oblot::engine::*;
use oblot::model::{Configuration, RobotId};
use oblot::scenario::{FrameMode, FramesSpec, Scenario};
use oblot::schedulers::{ActivationKind, ActivationSpec, MovementKind, MovementSpec};
use oblot::{Error, Point};

fn scenario(robots: Vec<Point>, pattern: Vec<Point>, algorithm: AlgorithmKind, act: ActivationKind, mv: MovementKind, delta: f64) -> Scenario {
    Scenario {
        robots,
        frames: FramesSpec::Mode(FrameMode::Random),
        pattern,
        algorithm,
        activation: ActivationSpec { kind: act, seed: Some(1), script: None, window: None },
        movement: MovementSpec { kind: mv, delta, seed: Some(1), script: None },
        weak_detection: algorithm == AlgorithmKind::SeqGathering,
        eps: 1e-9,
        max_rounds: None,
        seed: 1,
    }
}

fn pentagon() -> Vec<Point> {
    (0..5).map(|i| Point::polar(1.0, i as f64 * TAU / 5.0)).collect()
}

fn movers(trace: &Trace) -> usize {
    trace.events.iter().flat_map(|e| &e.actions).filter(|a| a.outcome.actual != a.outcome.start).count()
}

#[test]
fn rigid_rendezvous_meets_in_one_round() {
    let s = scenario(
        vec![Point::ORIGIN, Point::new(3.0, 1.0)],
        vec![Point::ORIGIN],
        AlgorithmKind::Rendezvous,
        ActivationKind::SeqRoundRobin,
        MovementKind::Rigid,
        0.1,
    );
    let t = run(&s).unwrap();
    assert_eq!(t.formed_at, Some(1));
    assert_eq!(t.status, RunStatus::Formed);
}

#[test]
fn rendezvous_closes_at_least_delta_per_move() {
    let delta = 0.25;
    let s = scenario(
        vec![Point::ORIGIN, Point::new(10.0 * delta, 0.0)],
        vec![Point::ORIGIN],
        AlgorithmKind::Rendezvous,
        ActivationKind::SeqRoundRobin,
        MovementKind::WorstCaseDelta,
        delta,
    );
    let t = run(&s).unwrap();
    assert_eq!(t.status, RunStatus::Formed);
    assert!(movers(&t) <= 10, "{} moves", movers(&t));
    let mut gap = 10.0 * delta;
    for e in &t.events {
        let p = e.actions[0].outcome;
        if p.actual == p.start {
            continue;
        }
        let other = if p.start.dist(p.intended) > 0.0 { p.intended } else { p.start };
        let next = p.actual.dist(other);
        assert!(next <= (gap - delta).max(0.0) + 1e-12);
        gap = next;
    }
}

#[test]
fn square_with_multiplicities_forms_a_pentagon_within_the_bound() {
    let square: Vec<Point> = (0..4).map(|i| Point::polar(2.0, i as f64 * TAU / 4.0)).collect();
    let robots: Vec<Point> = square.iter().flat_map(|&p| [p, p]).collect();
    let mut s = scenario(robots, pentagon(), AlgorithmKind::SeqPf, ActivationKind::SeqRoundRobin, MovementKind::WorstCaseDelta, 0.1);
    calibrate_delta(&mut s, 0.05);
    let t = run(&s).unwrap();
    assert_eq!(t.status, RunStatus::Formed);
    let reports = verify_bound(&t);
    assert!(reports.iter().all(|r| r.pass), "{reports:#?}");
    let total = reports.iter().find(|r| r.name == "seq-pf-total").unwrap();
    let ratio = (total.rho.unwrap() / s.delta() - 1e-9).ceil() as u64;
    assert_eq!(total.bound, 2 * 9 * ratio + 2);
}

#[test]
fn replays_are_bit_identical() {
    for family in [Family::SeqPf, Family::SeqPfSmall, Family::SeqGathering] {
        let s = scenario_for(family, [5, 9], None, 17);
        let a = run(&s).unwrap();
        let b = run(&s).unwrap();
        assert_eq!(a.hash, b.hash);
        assert_eq!(a.to_jsonl().unwrap(), b.to_jsonl().unwrap());
    }
}

#[test]
fn trace_scenario_block_reruns_to_the_same_hash() {
    let s = scenario_for(Family::SeqPf, [5, 8], None, 4);
    let t = run(&s).unwrap();
    let text = t.to_jsonl().unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["type"], "scenario");
    let again = Scenario::from_json(&first["scenario"].to_string()).unwrap();
    assert_eq!(run(&again).unwrap().hash, t.hash);
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["type"], "summary");
    assert_eq!(last["trace_hash"], t.hash.as_str());
    assert_eq!(text.lines().count(), t.events.len() + 2);
}

#[test]
fn sequential_rounds_move_at_most_one_robot() {
    let s = scenario_for(Family::SeqPf, [6, 10], None, 8);
    let t = run(&s).unwrap();
    let mut prev = s.robots.clone();
    let mut current = prev.clone();
    for e in &t.events {
        assert_eq!(e.activated.len(), 1);
        for a in &e.actions {
            current[a.robot.0] = a.outcome.actual;
        }
        let changed = prev.iter().zip(&current).filter(|(a, b)| a != b).count();
        assert!(changed <= 1);
        prev = current.clone();
    }
    assert_eq!(current, t.final_positions);
}

#[test]
fn round_robin_epochs_every_n_rounds_and_fsync_every_round() {
    let s = scenario_for(Family::SeqPf, [7, 7], Some([5, 5]), 2);
    let t = run(&s).unwrap();
    let n = s.n() as u64;
    let expected: Vec<u64> = (1..=t.events.len() as u64 / n).map(|i| i * n).collect();
    assert_eq!(t.epoch_marks, expected);

    let mut f = scenario(
        vec![Point::ORIGIN, Point::new(1.0, 0.0), Point::new(0.0, 2.0)],
        vec![Point::ORIGIN],
        AlgorithmKind::GoToCenterSec,
        ActivationKind::Fsync,
        MovementKind::WorstCaseDelta,
        0.01,
    );
    f.max_rounds = Some(20);
    let t = run(&f).unwrap();
    let rounds: Vec<u64> = (1..=t.events.len() as u64).collect();
    assert_eq!(t.epoch_marks, rounds);
}

#[test]
fn seq_pf_stages_never_go_backwards() {
    for seed in 0..6 {
        let s = scenario_for(Family::SeqPf, [5, 12], None, 100 + seed);
        let t = run(&s).unwrap();
        let end = t.formed_at.unwrap() as usize;
        for w in t.events[..end].windows(2) {
            assert!(w[0].stage <= w[1].stage, "seed {seed}: {:?} -> {:?}", w[0].stage, w[1].stage);
        }
        let init: Vec<_> = verify_bound(&t).into_iter().filter(|r| r.stage == Some(Stage::Initialization)).collect();
        assert!(init[0].observed <= 1);
    }
}

#[test]
fn unformed_runs_are_inconclusive() {
    let mut s = scenario_for(Family::SeqPf, [8, 8], None, 3);
    s.max_rounds = Some(5);
    let t = run(&s).unwrap();
    assert_eq!(t.status, RunStatus::Horizon);
    assert!(verify_bound(&t).iter().all(|r| r.inconclusive && !r.pass));
}

#[test]
fn fsync_trap_keeps_distinct_points_from_growing() {
    let pattern = pentagon();
    let start = trap_start(5, 5, 3);
    let (trace, report) = demo_fsync_trap(&pattern, &start, AlgorithmKind::SeqPf, 2_000).unwrap();
    assert!(report.trap_confirmed && !report.formed);
    assert_eq!(report.q0, 3);
    assert!(trace.q_count_series.iter().all(|&q| q <= 3));

    let square: Vec<Point> = (0..4).map(|i| Point::polar(1.0, i as f64 * TAU / 4.0)).collect();
    let start = vec![Point::ORIGIN, Point::ORIGIN, Point::new(1.0, 0.0), Point::new(1.0, 0.0)];
    let (trace, report) = demo_fsync_trap(&square, &start, AlgorithmKind::GoToCenterSec, 200).unwrap();
    assert!(report.trap_confirmed);
    assert!(trace.q_count_series.iter().all(|&q| q < 4));
    assert_eq!(*trace.q_count_series.last().unwrap(), 1);

    let hexagon: Vec<Point> = (0..6).map(|i| Point::polar(1.0, i as f64 * TAU / 6.0)).collect();
    assert!(matches!(
        demo_fsync_trap(&hexagon, &hexagon, AlgorithmKind::SeqPf, 10),
        Err(Error::Usage(_))
    ));
}

#[test]
fn mirror_adversary_defeats_naive_candidates() {
    for (candidate, act) in [
        (AlgorithmKind::Stay, Act::Stay),
        (AlgorithmKind::GoToOther, Act::MoveToOther),
        (AlgorithmKind::GoToMidpoint, Act::MoveElsewhere),
    ] {
        let (trace, report) = demo_mirror_gathering(candidate, 3, 2_000, false).unwrap();
        assert_eq!(report.act, Some(act));
        assert!(report.min_q >= 2 && !report.gathered, "{report:?}");
        assert!(trace.q_count_series.iter().all(|&q| q >= 2));
        assert_ne!(report.verdict, "gathered");
    }
    let (_, report) = demo_mirror_gathering(AlgorithmKind::SeqGathering, 3, 2_000, true).unwrap();
    assert_eq!(report.verdict, "gathered");
    assert!(matches!(
        demo_mirror_gathering(AlgorithmKind::SeqGathering, 3, 10, false),
        Err(Error::Capability(_))
    ));
    assert!(matches!(demo_mirror_gathering(AlgorithmKind::Stay, 2, 10, false), Err(Error::Usage(_))));
}

#[test]
fn formed_and_quiescent_probe() {
    let gathered = scenario(
        vec![Point::new(1.0, 1.0); 3],
        vec![Point::ORIGIN],
        AlgorithmKind::SeqGathering,
        ActivationKind::SeqRandom,
        MovementKind::Random,
        0.1,
    );
    let c = Configuration::new(gathered.robots.clone(), gathered.tolerance()).unwrap();
    assert!(check_formed_and_quiescent(&c, &gathered).unwrap());

    // A pentagon whose SEC center is occupied by a sixth robot: Q has k points of the pattern
    // plus one extra, so a robot still wants to move.
    let mut robots = pentagon();
    robots.push(robots[0]);
    let s = scenario(robots.clone(), pentagon(), AlgorithmKind::SeqPf, ActivationKind::SeqRoundRobin, MovementKind::Rigid, 0.1);
    let c = Configuration::new(robots, s.tolerance()).unwrap();
    assert!(check_formed_and_quiescent(&c, &s).unwrap());

    let mut e = Engine::new(s.clone()).unwrap();
    assert!(e.is_formed());
    e.set_frame_rule(|_, _| oblot::model::Orientation::IDENTITY);
    assert!(e.formed_and_quiescent().unwrap());

    let mid = scenario_for(Family::SeqPf, [6, 6], Some([5, 5]), 9);
    let c = Configuration::new(mid.robots.clone(), mid.tolerance()).unwrap();
    assert!(!check_formed_and_quiescent(&c, &mid).unwrap());
}

#[test]
fn formed_pattern_with_a_restless_robot_is_not_quiescent() {
    let g = scenario(
        vec![Point::ORIGIN, Point::ORIGIN, Point::new(1.0, 0.0)],
        vec![Point::ORIGIN],
        AlgorithmKind::GoToOther,
        ActivationKind::SeqRoundRobin,
        MovementKind::Rigid,
        0.1,
    );
    let mut e = Engine::new(g).unwrap();
    assert!(!e.is_formed());
    e.step(&[RobotId(2)], |p| Ok(p.interval.1)).unwrap();
    assert!(e.is_formed());

    // The pattern is two points; a robot running go-to-other on it is formed but restless.
    let two = scenario(
        vec![Point::ORIGIN, Point::new(1.0, 0.0)],
        vec![Point::ORIGIN, Point::new(2.0, 0.0)],
        AlgorithmKind::GoToOther,
        ActivationKind::SeqRoundRobin,
        MovementKind::Rigid,
        0.1,
    );
    let e = Engine::new(two).unwrap();
    assert!(e.is_formed());
    assert!(!e.formed_and_quiescent().unwrap());
}

#[test]
fn illegal_truncation_aborts_with_a_contract_error() {
    let s = scenario(
        vec![Point::ORIGIN, Point::new(5.0, 0.0)],
        vec![Point::ORIGIN],
        AlgorithmKind::Rendezvous,
        ActivationKind::SeqRoundRobin,
        MovementKind::WorstCaseDelta,
        1.0,
    );
    let mut e = Engine::new(s).unwrap();
    let err = e.step(&[RobotId(0)], |_| Ok(0.5)).unwrap_err();
    assert!(matches!(err, Error::AdversaryContract(_)), "{err}");
}

#[test]
fn every_scenario_of_a_family_replays() {
    let spec: oblot::engine::generate::BatchSpec = serde_json::from_str(
        r#"{"generators":[{"family":"seq-pf-small","count":4,"n":[3,6],"seed":5},
                          {"family":"rendezvous","count":2,"n":[2,2],"seed":1}]}"#,
    )
    .unwrap();
    let rows = oblot::engine::generate::run_batch(&spec, 2).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    let again = oblot::engine::generate::run_batch(&spec, 1).unwrap();
    assert_eq!(rows, again);
}
