//! Scripted stand-in for the driving policy under test.
//!
//! Pure-pursuit steering, proportional speed tracking to the speed limit,
//! stop-and-wait at stop triggers, and an emergency stop for a vehicle in
//! its lane only once the bumper gap falls under a short fixed headway.

use serde::{Deserialize, Serialize};

use crate::control::ControlCommand;
use crate::error::{Error, Result};
use crate::sim::scenario::Scenario;
use crate::sim::world::{VehicleParams, World};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineParams {
    pub lookahead_min: f64,
    /// Lookahead growth with speed, seconds.
    pub lookahead_time: f64,
    /// Proportional speed gain, command units per m/s.
    pub speed_gain: f64,
    /// Throttle feed-forward while cruising.
    pub throttle_bias: f64,
    /// Planned deceleration toward a stop trigger, m/s^2.
    pub stop_decel: f64,
    /// Bumper gap below which a leading vehicle triggers a full stop, m.
    pub headway: f64,
    pub goal_tolerance: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            lookahead_min: 4.0,
            lookahead_time: 0.5,
            speed_gain: 0.5,
            throttle_bias: 0.02,
            stop_decel: 2.0,
            headway: 6.0,
            goal_tolerance: 1.0,
        }
    }
}

impl BaselineParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lookahead_min", self.lookahead_min),
            ("speed_gain", self.speed_gain),
            ("stop_decel", self.stop_decel),
            ("goal_tolerance", self.goal_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("baseline.{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [
            ("lookahead_time", self.lookahead_time),
            ("throttle_bias", self.throttle_bias),
            ("headway", self.headway),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("baseline.{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct StopPoint {
    s: f64,
    wait: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineController {
    params: BaselineParams,
    stops: Vec<StopPoint>,
    next_stop: usize,
    waited: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineOutput {
    pub command: ControlCommand,
    pub route_complete: bool,
}

impl BaselineController {
    pub fn new(scenario: &Scenario, world: &World, params: BaselineParams) -> Self {
        let mut stops: Vec<StopPoint> = scenario
            .stop_triggers
            .iter()
            .map(|t| StopPoint {
                s: world.route.project(t.position, 0).0,
                wait: t.wait,
            })
            .collect();
        stops.sort_by(|a, b| a.s.total_cmp(&b.s));
        Self {
            params,
            stops,
            next_stop: 0,
            waited: 0.0,
        }
    }

    pub fn params(&self) -> &BaselineParams {
        &self.params
    }

    /// Command for the current world snapshot. Advances stop bookkeeping.
    pub fn command(&mut self, world: &World, vehicle: &VehicleParams, dt: f64) -> BaselineOutput {
        let p = self.params;
        let ego = &world.ego;
        if world.progress >= world.route.length() - p.goal_tolerance {
            return BaselineOutput {
                command: ControlCommand::IDLE,
                route_complete: true,
            };
        }

        let lookahead = p.lookahead_min + p.lookahead_time * ego.speed;
        let target = world.route.point_at(world.progress + lookahead);
        let local = (target - ego.position).rotate(-ego.heading);
        let alpha = local.y.atan2(local.x);
        let wheel = (2.0 * ego.wheelbase * alpha.sin()).atan2(lookahead);
        let steer = (wheel / vehicle.max_steer).clamp(-1.0, 1.0);

        let mut v_target = world.road.v_limit;
        if let Some(stop) = self.stops.get(self.next_stop).copied() {
            let dist = stop.s - world.progress;
            if dist < -2.0 {
                self.next_stop += 1;
                self.waited = 0.0;
            } else if dist <= 0.5 && ego.speed < 0.2 {
                v_target = 0.0;
                self.waited += dt;
                if self.waited >= stop.wait {
                    self.next_stop += 1;
                    self.waited = 0.0;
                    v_target = world.road.v_limit;
                }
            } else {
                v_target = v_target.min((2.0 * p.stop_decel * dist.max(0.0)).sqrt());
            }
        }

        if self.lead_gap(world).is_some_and(|gap| gap < p.headway) {
            return BaselineOutput {
                command: ControlCommand::new(0.0, 1.0, steer),
                route_complete: false,
            };
        }

        let u = if v_target > 0.0 {
            p.speed_gain * (v_target - ego.speed) + p.throttle_bias
        } else {
            p.speed_gain * (v_target - ego.speed) - p.throttle_bias
        };
        let command = if u >= 0.0 {
            ControlCommand::new(u.min(1.0), 0.0, steer)
        } else {
            ControlCommand::new(0.0, (-u).min(1.0), steer)
        };
        BaselineOutput {
            command,
            route_complete: false,
        }
    }

    /// Bumper gap to the nearest vehicle centred in the ego lane ahead.
    fn lead_gap(&self, world: &World) -> Option<f64> {
        let ego = &world.ego;
        let half_lane = world.road.lane_width / 2.0;
        world
            .npcs
            .iter()
            .filter(|n| n.present())
            .filter_map(|n| {
                let d = (n.position - ego.position).rotate(-ego.heading);
                (d.x > 0.0 && d.y.abs() <= half_lane).then_some(d.x - ego.half_length - n.half_length)
            })
            .min_by(|a, b| a.total_cmp(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Vec2;
    use crate::sim::scenario::{EgoStart, MapSpec, NpcScript, NpcWaypoint, StopTrigger, SCHEMA};

    fn scenario() -> Scenario {
        Scenario {
            schema: SCHEMA.into(),
            name: "b".into(),
            description: String::new(),
            failure_prone: false,
            tags: vec![],
            map: MapSpec {
                lanes: 2,
                lane_width: 3.5,
                speed_limit: 10.0,
                route: vec![Vec2::new(0.0, 0.0), Vec2::new(200.0, 0.0)],
            },
            ego: EgoStart {
                position: Vec2::ZERO,
                heading: None,
                speed: 10.0,
                half_length: 2.3,
                half_width: 1.0,
                wheelbase: 2.9,
            },
            npcs: vec![],
            stop_triggers: vec![],
            duration_limit: 30.0,
            dt: 0.05,
        }
    }

    fn run(s: &Scenario) -> BaselineOutput {
        let w = World::from_scenario(s);
        let mut b = BaselineController::new(s, &w, BaselineParams::default());
        b.command(&w, &VehicleParams::default(), s.dt)
    }

    #[test]
    fn cruising_at_limit() {
        let out = run(&scenario());
        assert!(out.command.steer.abs() < 1e-12);
        assert!(out.command.throttle > 0.0 && out.command.throttle < 0.1);
        assert_eq!(out.command.brake, 0.0);
    }

    #[test]
    fn brakes_for_stop_trigger() {
        let mut s = scenario();
        s.stop_triggers.push(StopTrigger {
            position: Vec2::new(20.0, 0.0),
            wait: 2.0,
        });
        let out = run(&s);
        assert!(out.command.brake > 0.0);
        assert_eq!(out.command.throttle, 0.0);
    }

    #[test]
    fn steers_toward_left_lookahead() {
        let mut s = scenario();
        s.map.route = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(8.0, 7.0)];
        s.ego.heading = Some(0.0);
        s.ego.speed = 0.0;
        let out = run(&s);
        assert!(out.command.steer > 0.0);
    }

    #[test]
    fn emergency_stop_inside_headway_only() {
        let mut s = scenario();
        let parked = |x: f64| NpcScript {
            id: "p".into(),
            spawn_time: 0.0,
            waypoints: vec![
                NpcWaypoint {
                    x,
                    y: 0.0,
                    speed: 0.0,
                },
                NpcWaypoint {
                    x: x + 5.0,
                    y: 0.0,
                    speed: 0.0,
                },
            ],
            max_accel: None,
            violation: false,
            half_length: 2.3,
            half_width: 1.0,
        };
        s.npcs = vec![parked(30.0)];
        assert_eq!(run(&s).command.brake, 0.0);
        s.npcs = vec![parked(10.0)];
        assert_eq!(run(&s).command.brake, 1.0);
    }

    #[test]
    fn route_end_reports_completion() {
        let mut s = scenario();
        s.ego.position = Vec2::new(199.5, 0.0);
        let out = run(&s);
        assert!(out.route_complete);
        assert_eq!(out.command, ControlCommand::IDLE);
    }
}
