//! Closed-loop scenario execution and per-tick trace records.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::control::{decision_cycle, ControlCommand, ControllerState, CriParams, DrivingMode};
use crate::error::{Error, Result};
use crate::sector::{SectorField, SECTORS};
use crate::sim::baseline::{BaselineController, BaselineParams};
use crate::sim::collision::ContactTracker;
use crate::sim::scenario::Scenario;
use crate::sim::world::{step_world, VehicleParams, World};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimParams {
    /// Overrides the scenario's own step when set.
    pub dt: Option<f64>,
    pub vehicle: VehicleParams,
    pub baseline: BaselineParams,
    /// End the run at the first collision instead of logging and continuing.
    pub stop_on_collision: bool,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("sim.dt must be > 0, got {dt}")));
            }
        }
        self.vehicle.validate()?;
        self.baseline.validate()
    }
}

/// Wall-clock cost of one tick, microseconds. Excluded from golden checks.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TickTiming {
    pub baseline_us: f64,
    pub init_us: f64,
    pub reception_us: f64,
    pub adaptation_us: f64,
    pub step_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickTrace {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub accel: f64,
    pub r: [f64; SECTORS],
    pub cri_final: f64,
    pub cri_final_raw: f64,
    pub dominant_sector: usize,
    pub mode: DrivingMode,
    pub throttle: f64,
    pub brake: f64,
    pub steer: f64,
    pub fault: bool,
    pub collisions: Vec<String>,
    pub timing: TickTiming,
}

impl TickTrace {
    /// Copy with wall-clock fields zeroed, for deterministic comparison.
    pub fn without_timing(&self) -> TickTrace {
        TickTrace {
            timing: TickTiming::default(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Timeout,
    Collided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub scenario: String,
    pub cri_enabled: bool,
    pub status: RunStatus,
    pub ticks: usize,
    pub duration: f64,
    pub distance_km: f64,
    pub route_length_km: f64,
    pub collisions: usize,
}

impl Outcome {
    pub fn completion(&self) -> f64 {
        if self.status == RunStatus::Completed {
            1.0
        } else if self.route_length_km > 0.0 {
            (self.distance_km / self.route_length_km).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub trace: Vec<TickTrace>,
    pub outcome: Outcome,
}

fn elapsed_us(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e6
}

/// Runs a scenario to completion, timeout or (optionally) first collision.
///
/// With `cri_enabled == false` the risk field is still computed and logged
/// but the baseline command is applied unchanged.
pub fn run_scenario(
    scenario: &Scenario,
    cri_enabled: bool,
    cri: &CriParams,
    sim: &SimParams,
) -> Result<RunResult> {
    scenario.validate()?;
    let dt = sim.dt.unwrap_or(scenario.dt);
    let mut world = World::from_scenario(scenario);
    let mut baseline = BaselineController::new(scenario, &world, sim.baseline);
    let mut state = ControllerState::default();
    let mut contacts = ContactTracker::new(world.npcs.len());
    let max_ticks = (scenario.duration_limit / dt).round() as usize;

    let mut trace = Vec::with_capacity(max_ticks);
    let mut collisions = 0;
    let mut status = RunStatus::Timeout;

    for _ in 0..max_ticks {
        let mut timing = TickTiming::default();
        let start = Instant::now();
        let base = baseline.command(&world, &sim.vehicle, dt);
        timing.baseline_us = elapsed_us(start);
        if base.route_complete {
            status = RunStatus::Completed;
            break;
        }

        let objects = world.objects();
        let cycle = decision_cycle(&world.ego, &objects, &world.road, cri, &mut state, base.command);
        timing.init_us = cycle.diagnostics.timing.init_us;
        timing.reception_us = cycle.diagnostics.timing.reception_us;
        timing.adaptation_us = cycle.diagnostics.timing.adaptation_us;
        let applied: ControlCommand = if cri_enabled { cycle.command } else { base.command };

        let start = Instant::now();
        step_world(&mut world, applied, &sim.vehicle, dt);
        timing.step_us = elapsed_us(start);

        let ego_box = world.ego_obb();
        let boxes: Vec<(&str, Option<_>)> = world
            .npcs
            .iter()
            .map(|n| (n.id.as_str(), n.present().then(|| n.obb())))
            .collect();
        let events = contacts.update(&ego_box, &boxes);
        collisions += events.len();

        trace.push(record(
            &world,
            &cycle.field,
            cycle.diagnostics.mode,
            applied,
            &cycle.diagnostics.fault,
            events,
            timing,
        ));

        if sim.stop_on_collision && collisions > 0 {
            status = RunStatus::Collided;
            break;
        }
    }

    let outcome = Outcome {
        scenario: scenario.name.clone(),
        cri_enabled,
        status,
        ticks: trace.len(),
        duration: world.time,
        distance_km: world.progress / 1000.0,
        route_length_km: world.route.length() / 1000.0,
        collisions,
    };
    Ok(RunResult { trace, outcome })
}

fn record(
    world: &World,
    field: &SectorField,
    mode: DrivingMode,
    cmd: ControlCommand,
    fault: &Option<String>,
    events: Vec<crate::sim::collision::CollisionEvent>,
    timing: TickTiming,
) -> TickTrace {
    let cmd = cmd.normalized();
    TickTrace {
        t: world.time,
        x: world.ego.position.x,
        y: world.ego.position.y,
        heading: world.ego.heading,
        speed: world.ego.speed,
        accel: world.ego.accel,
        r: field.r,
        cri_final: field.cri_final,
        cri_final_raw: field.cri_final_raw,
        dominant_sector: field.dominant_sector,
        mode,
        throttle: cmd.throttle,
        brake: cmd.brake,
        steer: cmd.steer,
        fault: fault.is_some(),
        collisions: events.into_iter().map(|e| e.npc).collect(),
        timing,
    }
}

/// Writes one JSON object per line; field order follows [`TickTrace`].
pub fn write_trace<W: Write>(mut out: W, trace: &[TickTrace]) -> std::io::Result<()> {
    for rec in trace {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_trace(text: &str) -> Result<Vec<TickTrace>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Trace(format!("trace line {}: {e}", i + 1))))
        .collect()
}
