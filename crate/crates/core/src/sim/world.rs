//! Fixed-step kinematic world: bicycle-model ego and scripted NPCs.

use serde::{Deserialize, Serialize};

use crate::control::ControlCommand;
use crate::error::{Error, Result};
use crate::geometry::{EgoState, ObjectState, RoadContext};
use crate::math::{wrap_angle, Vec2};
use crate::sim::collision::Obb;
use crate::sim::scenario::{NpcScript, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleParams {
    /// Acceleration at full throttle, m/s^2.
    pub a_max: f64,
    /// Deceleration at full brake, m/s^2.
    pub a_brake: f64,
    /// Road-wheel angle at full steer, rad.
    pub max_steer: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            a_max: 3.5,
            a_brake: 8.0,
            max_steer: 0.6,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a_max", self.a_max), ("a_brake", self.a_brake)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("vehicle.{name} must be > 0, got {v}")));
            }
        }
        if !(self.max_steer > 0.0 && self.max_steer < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config("vehicle.max_steer must be in (0, pi/2)".into()));
        }
        Ok(())
    }
}

/// Polyline with cumulative arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Vec2>,
    cumulative: Vec<f64>,
}

impl Polyline {
    pub fn new(points: Vec<Vec2>) -> Self {
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in points.windows(2) {
            acc += (w[1] - w[0]).norm();
            cumulative.push(acc);
        }
        Self { points, cumulative }
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    pub fn segments(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn segment_direction(&self, seg: usize) -> Vec2 {
        let d = self.points[seg + 1] - self.points[seg];
        d * (1.0 / d.norm())
    }

    /// Point at arc length `s`, clamped to the ends.
    pub fn point_at(&self, s: f64) -> Vec2 {
        let s = s.clamp(0.0, self.length());
        let seg = match self.cumulative.iter().position(|&c| c > s) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => self.segments() - 1,
        };
        self.points[seg] + self.segment_direction(seg) * (s - self.cumulative[seg])
    }

    /// Closest-point arc length, searching segments from `from_seg` on.
    /// Returns `(s, segment, lateral offset)`; offset is positive left.
    pub fn project(&self, p: Vec2, from_seg: usize) -> (f64, usize, f64) {
        let mut best = (f64::INFINITY, 0.0, from_seg, 0.0);
        for seg in from_seg.min(self.segments() - 1)..self.segments() {
            let a = self.points[seg];
            let len = self.cumulative[seg + 1] - self.cumulative[seg];
            let dir = self.segment_direction(seg);
            let t = (p - a).dot(dir).clamp(0.0, len);
            let foot = a + dir * t;
            let dist = (p - foot).norm();
            if dist < best.0 {
                best = (dist, self.cumulative[seg] + t, seg, dir.cross(p - a));
            }
        }
        (best.1, best.2, best.3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Npc {
    pub id: String,
    path: Polyline,
    speeds: Vec<f64>,
    max_accel: Option<f64>,
    spawn_time: f64,
    pub active: bool,
    pub finished: bool,
    seg: usize,
    s_on_seg: f64,
    pub speed: f64,
    pub position: Vec2,
    pub heading: f64,
    pub half_length: f64,
    pub half_width: f64,
}

impl Npc {
    fn from_script(script: &NpcScript) -> Self {
        let path = Polyline::new(script.waypoints.iter().map(|w| w.position()).collect());
        let dir = path.segment_direction(0);
        Self {
            id: script.id.clone(),
            speeds: script.waypoints.iter().map(|w| w.speed).collect(),
            max_accel: script.max_accel,
            spawn_time: script.spawn_time,
            active: false,
            finished: false,
            seg: 0,
            s_on_seg: 0.0,
            speed: script.waypoints[0].speed,
            position: script.waypoints[0].position(),
            heading: dir.y.atan2(dir.x),
            half_length: script.half_length,
            half_width: script.half_width,
            path,
        }
    }

    pub fn velocity(&self) -> Vec2 {
        Vec2::from_angle(self.heading) * self.speed
    }

    pub fn present(&self) -> bool {
        self.active && !self.finished
    }

    pub fn obb(&self) -> Obb {
        Obb::new(self.position, self.heading, self.half_length, self.half_width)
    }

    pub fn as_object(&self) -> ObjectState {
        ObjectState {
            id: self.id.clone(),
            position: self.position,
            velocity: self.velocity(),
            heading: self.heading,
            half_length: self.half_length,
            half_width: self.half_width,
        }
    }

    /// Advances one tick; `time` is the simulation time at the start of it.
    fn step(&mut self, time: f64, dt: f64) {
        if self.finished {
            return;
        }
        if !self.active {
            // spawn at the first tick boundary at or after spawn_time
            if time + 1e-9 >= self.spawn_time {
                self.active = true;
            } else {
                return;
            }
        }
        let mut travel = self.speed * dt;
        loop {
            let seg_len = self.path.segment_length(self.seg);
            let remaining = seg_len - self.s_on_seg;
            if travel < remaining {
                self.s_on_seg += travel;
                break;
            }
            travel -= remaining;
            self.seg += 1;
            self.s_on_seg = 0.0;
            if self.seg >= self.path.segments() {
                self.finished = true;
                return;
            }
        }
        let dir = self.path.segment_direction(self.seg);
        self.position = self.path.points[self.seg] + dir * self.s_on_seg;
        self.heading = dir.y.atan2(dir.x);
        let target = self.speeds[self.seg];
        self.speed = match self.max_accel {
            Some(a) => self.speed + (target - self.speed).clamp(-a * dt, a * dt),
            None => target,
        };
    }
}

impl Polyline {
    fn segment_length(&self, seg: usize) -> f64 {
        self.cumulative[seg + 1] - self.cumulative[seg]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub time: f64,
    pub tick: u64,
    pub ego: EgoState,
    pub npcs: Vec<Npc>,
    pub route: Polyline,
    pub road: RoadContext,
    /// Ego arc length along the route.
    pub progress: f64,
    pub route_segment: usize,
}

impl World {
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let ego = EgoState {
            position: scenario.ego.position,
            heading: wrap_angle(scenario.ego_heading()),
            speed: scenario.ego.speed,
            accel: 0.0,
            half_length: scenario.ego.half_length,
            half_width: scenario.ego.half_width,
            wheelbase: scenario.ego.wheelbase,
        };
        let route = Polyline::new(scenario.map.route.clone());
        let (progress, route_segment, _) = route.project(ego.position, 0);
        let mut world = Self {
            time: 0.0,
            tick: 0,
            ego,
            npcs: scenario.npcs.iter().map(Npc::from_script).collect(),
            route,
            road: RoadContext {
                v_limit: scenario.map.speed_limit,
                lanes: scenario.map.lanes,
                lane_width: scenario.map.lane_width,
            },
            progress,
            route_segment,
        };
        // NPCs due at t = 0 appear in the initial snapshot
        for npc in &mut world.npcs {
            if npc.spawn_time <= 0.0 {
                npc.active = true;
            }
        }
        world
    }

    pub fn objects(&self) -> Vec<ObjectState> {
        self.npcs
            .iter()
            .filter(|n| n.present())
            .map(Npc::as_object)
            .collect()
    }

    pub fn ego_obb(&self) -> Obb {
        Obb::new(
            self.ego.position,
            self.ego.heading,
            self.ego.half_length,
            self.ego.half_width,
        )
    }
}

/// Advances the world by one fixed step.
///
/// Ego: explicit Euler on the kinematic bicycle model with
/// `a = throttle * a_max - brake * a_brake` and speed floored at zero.
pub fn step_world(world: &mut World, command: ControlCommand, vehicle: &VehicleParams, dt: f64) {
    let cmd = command.normalized();
    let ego = &mut world.ego;
    let v = ego.speed;
    let steer_angle = cmd.steer * vehicle.max_steer;
    let (s, c) = ego.heading.sin_cos();
    ego.position = ego.position + Vec2::new(c, s) * (v * dt);
    ego.heading = wrap_angle(ego.heading + v / ego.wheelbase * steer_angle.tan() * dt);
    let a_cmd = cmd.throttle * vehicle.a_max - cmd.brake * vehicle.a_brake;
    let v_next = (v + a_cmd * dt).max(0.0);
    ego.accel = (v_next - v) / dt;
    ego.speed = v_next;

    for npc in &mut world.npcs {
        npc.step(world.time, dt);
    }
    let (progress, seg, _) = world.route.project(world.ego.position, world.route_segment);
    if progress > world.progress {
        world.progress = progress;
    }
    world.route_segment = seg;
    world.tick += 1;
    world.time = world.tick as f64 * dt;
}
