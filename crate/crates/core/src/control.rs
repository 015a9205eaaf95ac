//! Risk-adaptive driving-mode selection and command modulation.

use std::f64::consts::FRAC_PI_4;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    build_envelope, filter_objects, lead_speed, EgoState, Envelope, EnvelopeParams, ObjectState, RoadContext,
};
use crate::risk::{assess_object, ObjectRisk, RiskParams};
use crate::sector::{aggregate, fuse, SectorField};

/// Ordered from least to most cautious.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrivingMode {
    Aggressive,
    Neutral,
    Conservative,
}

impl DrivingMode {
    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlCommand {
    pub throttle: f64,
    pub brake: f64,
    pub steer: f64,
}

impl ControlCommand {
    pub const IDLE: ControlCommand = ControlCommand {
        throttle: 0.0,
        brake: 0.0,
        steer: 0.0,
    };

    pub fn new(throttle: f64, brake: f64, steer: f64) -> Self {
        Self {
            throttle,
            brake,
            steer,
        }
    }

    /// Clamps every channel to its range and drops throttle under braking.
    pub fn normalized(self) -> Self {
        let brake = self.brake.clamp(0.0, 1.0);
        let throttle = if brake > 0.0 {
            0.0
        } else {
            self.throttle.clamp(0.0, 1.0)
        };
        Self {
            throttle,
            brake,
            steer: self.steer.clamp(-1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerParams {
    pub t_lo: f64,
    pub t_hi: f64,
    /// Margin past a threshold that switches mode immediately.
    pub hysteresis: f64,
    /// Ticks a candidate mode must persist before a non-decisive switch.
    pub n_hold: u32,
    /// Threshold reduction when the dominant threat is frontal.
    pub front_shift: f64,
    /// Throttle multiplier per mode, indexed aggressive/neutral/conservative.
    pub throttle_gain: [f64; 3],
    pub neutral_brake_floor: f64,
    /// Sector risk at which the neutral brake floor engages.
    pub neutral_brake_risk: f64,
    pub emergency_brake: f64,
    pub steer_bias: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            t_lo: 0.30,
            t_hi: 0.60,
            hysteresis: 0.05,
            n_hold: 3,
            front_shift: 0.05,
            throttle_gain: [1.0, 0.8, 0.5],
            neutral_brake_floor: 0.2,
            neutral_brake_risk: 0.5,
            emergency_brake: 0.8,
            steer_bias: 0.2,
        }
    }
}

impl ControllerParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "controller.{name} must be in [0, 1], got {v}"
                )))
            }
        };
        unit("t_lo", self.t_lo)?;
        unit("t_hi", self.t_hi)?;
        if self.t_lo > self.t_hi {
            return Err(Error::Config(
                "controller.t_lo must not exceed controller.t_hi".into(),
            ));
        }
        unit("hysteresis", self.hysteresis)?;
        unit("front_shift", self.front_shift)?;
        for (i, g) in self.throttle_gain.iter().enumerate() {
            unit(&format!("throttle_gain[{i}]"), *g)?;
        }
        unit("neutral_brake_floor", self.neutral_brake_floor)?;
        unit("neutral_brake_risk", self.neutral_brake_risk)?;
        unit("emergency_brake", self.emergency_brake)?;
        unit("steer_bias", self.steer_bias)?;
        if self.n_hold < 1 {
            return Err(Error::Config("controller.n_hold must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct Pending {
    escalate: bool,
    ticks: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControllerState {
    pub mode: DrivingMode,
    pub ticks_in_mode: u64,
    pending: Option<Pending>,
}

impl Default for ControllerState {
    fn default() -> Self {
        Self {
            mode: DrivingMode::Aggressive,
            ticks_in_mode: 0,
            pending: None,
        }
    }
}

fn classify(cri: f64, lo: f64, hi: f64) -> DrivingMode {
    if cri >= hi {
        DrivingMode::Conservative
    } else if cri < lo {
        DrivingMode::Aggressive
    } else {
        DrivingMode::Neutral
    }
}

/// Picks the driving mode for this tick and updates the hysteresis state.
pub fn select_mode(
    cri_final: f64,
    theta_star: f64,
    state: &mut ControllerState,
    params: &ControllerParams,
) -> DrivingMode {
    let shift = if theta_star.abs() <= FRAC_PI_4 + 1e-12 {
        params.front_shift
    } else {
        0.0
    };
    let lo = params.t_lo - shift;
    let hi = params.t_hi - shift;
    let current = state.mode;
    let candidate = classify(cri_final, lo, hi);

    let next = if candidate == current {
        state.pending = None;
        current
    } else {
        let escalate = candidate > current;
        // only escalation may skip the dwell; releasing always waits it out
        let decisive = escalate && {
            let edge = if current == DrivingMode::Aggressive {
                lo
            } else {
                hi
            };
            cri_final >= edge + params.hysteresis
        };
        let ticks = match state.pending {
            Some(p) if p.escalate == escalate => p.ticks + 1,
            _ => 1,
        };
        if decisive || ticks >= params.n_hold {
            state.pending = None;
            candidate
        } else {
            state.pending = Some(Pending { escalate, ticks });
            current
        }
    };

    if next == current {
        state.ticks_in_mode += 1;
    } else {
        state.mode = next;
        state.ticks_in_mode = 0;
    }
    next
}

pub fn adapt_control(
    baseline: ControlCommand,
    mode: DrivingMode,
    field: &SectorField,
    params: &ControllerParams,
) -> ControlCommand {
    let mut cmd = baseline;
    cmd.throttle *= params.throttle_gain[mode.index()];
    match mode {
        DrivingMode::Aggressive => {}
        DrivingMode::Neutral => {
            if field.dominant_is_frontal() && field.r_star >= params.neutral_brake_risk {
                cmd.brake = cmd.brake.max(params.neutral_brake_floor);
            }
        }
        DrivingMode::Conservative => {
            if field.dominant_is_frontal() {
                cmd.brake = cmd.brake.max(params.emergency_brake * field.r_star);
            } else if field.dominant_is_lateral() {
                // steer away from the threat side
                cmd.steer -= params.steer_bias * field.r_star * field.theta_star.signum();
            }
        }
    }
    cmd.normalized()
}

/// Everything the decision cycle needs besides the world snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriParams {
    pub risk: RiskParams,
    pub envelope: EnvelopeParams,
    /// Weight of the vector sum against the peak sector in the final fusion.
    pub beta: f64,
    pub controller: ControllerParams,
}

impl Default for CriParams {
    fn default() -> Self {
        Self {
            risk: RiskParams::default(),
            envelope: EnvelopeParams::default(),
            beta: 0.7,
            controller: ControllerParams::default(),
        }
    }
}

impl CriParams {
    pub fn validate(&self) -> Result<()> {
        self.risk.validate()?;
        self.envelope.validate()?;
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!(
                "fusion.beta must be in [0, 1], got {}",
                self.beta
            )));
        }
        self.controller.validate()
    }
}

/// Wall-clock cost of each stage of one decision cycle, in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CycleTiming {
    pub init_us: f64,
    pub reception_us: f64,
    pub adaptation_us: f64,
}

impl CycleTiming {
    pub fn total_us(&self) -> f64 {
        self.init_us + self.reception_us + self.adaptation_us
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub envelope: Option<Envelope>,
    pub lead_speed: f64,
    pub risks: Vec<ObjectRisk>,
    pub mode: DrivingMode,
    pub timing: CycleTiming,
    /// Set when a stage failed and the baseline command was passed through.
    pub fault: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleOutput {
    pub command: ControlCommand,
    pub field: SectorField,
    pub diagnostics: Diagnostics,
}

fn elapsed_us(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e6
}

/// One pass of the adaptive policy: envelope, per-object risk, sector
/// fusion, mode selection and command adaptation.
///
/// Any stage failure returns `baseline` untouched with the fault recorded.
pub fn decision_cycle(
    ego: &EgoState,
    objects: &[ObjectState],
    road: &RoadContext,
    params: &CriParams,
    state: &mut ControllerState,
    baseline: ControlCommand,
) -> CycleOutput {
    let mut timing = CycleTiming::default();
    let start = Instant::now();
    let prepared = prepare(ego, objects, road, params);
    timing.init_us = elapsed_us(start);

    let (envelope, lead) = match prepared {
        Ok(p) => p,
        Err(e) => return fail_safe(baseline, state, None, 0.0, timing, e),
    };

    let start = Instant::now();
    let assessed = assess_all(ego, objects, road, params, &envelope);
    timing.reception_us = elapsed_us(start);
    let (risks, field) = match assessed {
        Ok(r) => r,
        Err(e) => return fail_safe(baseline, state, Some(envelope), lead, timing, e),
    };

    let start = Instant::now();
    let mode = select_mode(field.cri_final, field.theta_star, state, &params.controller);
    let command = adapt_control(baseline, mode, &field, &params.controller);
    timing.adaptation_us = elapsed_us(start);

    CycleOutput {
        command,
        field,
        diagnostics: Diagnostics {
            envelope: Some(envelope),
            lead_speed: lead,
            risks,
            mode,
            timing,
            fault: None,
        },
    }
}

fn prepare(
    ego: &EgoState,
    objects: &[ObjectState],
    road: &RoadContext,
    params: &CriParams,
) -> Result<(Envelope, f64)> {
    ego.validate()?;
    road.validate()?;
    for o in objects {
        o.validate()?;
    }
    let corridor = f64::from(road.lanes) * road.lane_width / 2.0 + params.envelope.lateral_margin;
    let lead = lead_speed(ego, objects, corridor).unwrap_or(ego.speed);
    let env = build_envelope(ego, road, &params.risk.rss, &params.envelope, lead);
    Ok((env, lead))
}

fn assess_all(
    ego: &EgoState,
    objects: &[ObjectState],
    road: &RoadContext,
    params: &CriParams,
    envelope: &Envelope,
) -> Result<(Vec<ObjectRisk>, SectorField)> {
    let inside = filter_objects(ego, objects, envelope)?;
    let risks = inside
        .iter()
        .map(|(obj, rel)| assess_object(&obj.id, ego, rel, road, &params.risk))
        .collect::<Result<Vec<_>>>()?;
    let field = fuse(&aggregate(&risks), params.beta);
    Ok((risks, field))
}

fn fail_safe(
    baseline: ControlCommand,
    state: &ControllerState,
    envelope: Option<Envelope>,
    lead: f64,
    timing: CycleTiming,
    err: Error,
) -> CycleOutput {
    CycleOutput {
        command: baseline,
        field: SectorField::empty(),
        diagnostics: Diagnostics {
            envelope,
            lead_speed: lead,
            risks: Vec::new(),
            mode: state.mode,
            timing,
            fault: Some(err.to_string()),
        },
    }
}
