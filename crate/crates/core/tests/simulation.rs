mod common;

use cri_core::control::{ControlCommand, CriParams, DrivingMode};
use cri_core::sim::corpus;
use cri_core::sim::world::VehicleParams;
use cri_core::sim::{run_scenario, step_world, SimParams, World};

fn run(name: &str, cri: bool) -> cri_core::sim::RunResult {
    let s = corpus::by_name(name).unwrap();
    run_scenario(&s, cri, &CriParams::default(), &SimParams::default()).unwrap()
}

#[test]
fn reruns_are_identical() {
    for name in ["intersection_stop_violation", "multi_threat", "curve_with_lead"] {
        for cri in [false, true] {
            let a = run(name, cri);
            let b = run(name, cri);
            assert_eq!(a.outcome, b.outcome);
            assert_eq!(a.trace.len(), b.trace.len());
            for (x, y) in a.trace.iter().zip(&b.trace) {
                assert_eq!(
                    x.without_timing(),
                    y.without_timing(),
                    "{name} cri={cri} t={}",
                    x.t
                );
            }
        }
    }
}

#[test]
fn no_objects_means_no_intervention() {
    for name in ["straight_empty", "curve_empty", "stop_sign_clear"] {
        let s = corpus::by_name(name).unwrap();
        assert!(s.npcs.is_empty(), "{name}");
        let base = run(name, false);
        let with = run(name, true);
        assert_eq!(base.outcome.ticks, with.outcome.ticks);
        assert_eq!(base.outcome.status, with.outcome.status);
        for (b, c) in base.trace.iter().zip(&with.trace) {
            assert_eq!(c.mode, DrivingMode::Aggressive);
            assert_eq!(c.cri_final, 0.0);
            assert_eq!(b.without_timing(), c.without_timing());
        }
    }
}

#[test]
fn kinematics_stay_physical() {
    let vehicle = VehicleParams::default();
    let limit = vehicle.a_max.max(vehicle.a_brake);
    for s in corpus::builtin() {
        for cri in [false, true] {
            let r = run_scenario(&s, cri, &CriParams::default(), &SimParams::default()).unwrap();
            let mut prev = (s.ego.position.x, s.ego.position.y, s.ego.speed);
            for t in &r.trace {
                assert!(t.speed >= 0.0);
                assert!(
                    (t.speed - prev.2).abs() <= limit * s.dt + 1e-9,
                    "{} t={}",
                    s.name,
                    t.t
                );
                // Euler: position advances by the previous speed
                let moved = ((t.x - prev.0).powi(2) + (t.y - prev.1).powi(2)).sqrt();
                assert!((moved - prev.2 * s.dt).abs() < 1e-9, "{} t={}", s.name, t.t);
                assert!((0.0..=1.0).contains(&t.throttle) && (0.0..=1.0).contains(&t.brake));
                prev = (t.x, t.y, t.speed);
            }
        }
    }
}

#[test]
fn coasting_conserves_speed_and_braking_never_adds_energy() {
    let s = corpus::by_name("straight_empty").unwrap();
    let vehicle = VehicleParams::default();
    let mut w = World::from_scenario(&s);
    let v0 = w.ego.speed;
    for _ in 0..100 {
        step_world(&mut w, ControlCommand::new(0.0, 0.0, 0.0), &vehicle, 0.05);
    }
    assert_eq!(w.ego.speed, v0);
    let mut last = w.ego.speed;
    for _ in 0..100 {
        step_world(&mut w, ControlCommand::new(0.0, 0.3, 0.4), &vehicle, 0.05);
        assert!(w.ego.speed <= last);
        last = w.ego.speed;
    }
    assert_eq!(last, 0.0);
}

#[test]
fn one_tick_of_full_throttle_from_rest() {
    let mut s = corpus::by_name("straight_empty").unwrap();
    s.ego.speed = 0.0;
    let mut w = World::from_scenario(&s);
    step_world(
        &mut w,
        ControlCommand::new(1.0, 0.0, 0.0),
        &VehicleParams::default(),
        0.05,
    );
    assert!((w.ego.speed - 0.175).abs() < 1e-12);
}

#[test]
fn golden_stage_b_signature() {
    let base = run("intersection_stop_violation", false);
    let with = run("intersection_stop_violation", true);
    let hit = base
        .trace
        .iter()
        .position(|t| !t.collisions.is_empty())
        .expect("baseline collides");
    assert!(base.outcome.collisions >= 1);
    assert_eq!(with.outcome.collisions, 0);
    let early = with
        .trace
        .iter()
        .take(hit.saturating_sub(5) + 1)
        .any(|t| t.cri_final >= 0.6);
    assert!(early, "no cri_final >= 0.6 by tick {}", hit - 5);
}

#[test]
fn violator_triggers_braking_on_envelope_entry() {
    let s = corpus::by_name("intersection_stop_violation").unwrap();
    let r = run_scenario(&s, true, &CriParams::default(), &SimParams::default()).unwrap();
    let entry = r
        .trace
        .iter()
        .position(|t| t.r.iter().any(|&x| x > 0.0) && t.cri_final >= 0.6)
        .unwrap();
    let window = &r.trace[entry..(entry + 5).min(r.trace.len())];
    assert!(window
        .iter()
        .any(|t| t.mode == DrivingMode::Conservative && t.brake >= 0.5));
}

#[test]
fn sat_agrees_with_sampling() {
    let mut rng = common::rng(91);
    let mut checked = 0;
    while checked < 200 {
        let (a, b) = (common::random_box(&mut rng), common::random_box(&mut rng));
        let near = common::sampled_overlap(&common::grown(&a, 0.01), &common::grown(&b, 0.01), 0.005);
        let far = common::sampled_overlap(&common::grown(&a, -0.01), &common::grown(&b, -0.01), 0.005);
        if near != far {
            continue;
        }
        assert_eq!(a.overlaps(&b), near, "{a:?} {b:?}");
        checked += 1;
    }
}
