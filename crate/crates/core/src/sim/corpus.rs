//! Built-in scenario corpus.
//!
//! Routes run along +x unless noted; the ego lane is centred on y = 0 and
//! left is +y. Five scenarios are tagged failure-prone: the baseline
//! collides in each of them.

use crate::math::Vec2;
use crate::sim::scenario::{EgoStart, MapSpec, NpcScript, NpcWaypoint, Scenario, StopTrigger, SCHEMA};

struct Builder {
    scenario: Scenario,
}

impl Builder {
    fn new(name: &str, description: &str) -> Self {
        Self {
            scenario: Scenario {
                schema: SCHEMA.into(),
                name: name.into(),
                description: description.into(),
                failure_prone: false,
                tags: Vec::new(),
                map: MapSpec {
                    lanes: 2,
                    lane_width: 3.5,
                    speed_limit: 10.0,
                    route: vec![Vec2::new(0.0, 0.0), Vec2::new(150.0, 0.0)],
                },
                ego: EgoStart {
                    position: Vec2::ZERO,
                    heading: None,
                    speed: 0.0,
                    half_length: 2.3,
                    half_width: 1.0,
                    wheelbase: 2.9,
                },
                npcs: Vec::new(),
                stop_triggers: Vec::new(),
                duration_limit: 40.0,
                dt: 0.05,
            },
        }
    }

    fn failure_prone(mut self) -> Self {
        self.scenario.failure_prone = true;
        self
    }

    fn tags(mut self, tags: &[&str]) -> Self {
        self.scenario.tags = tags.iter().map(|t| (*t).to_owned()).collect();
        self
    }

    fn road(mut self, lanes: u32, speed_limit: f64) -> Self {
        self.scenario.map.lanes = lanes;
        self.scenario.map.speed_limit = speed_limit;
        self
    }

    fn route(mut self, points: &[(f64, f64)]) -> Self {
        self.scenario.map.route = points.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        self
    }

    fn ego(mut self, x: f64, y: f64, speed: f64) -> Self {
        self.scenario.ego.position = Vec2::new(x, y);
        self.scenario.ego.speed = speed;
        self
    }

    fn duration(mut self, seconds: f64) -> Self {
        self.scenario.duration_limit = seconds;
        self
    }

    fn stop(mut self, x: f64, y: f64, wait: f64) -> Self {
        self.scenario.stop_triggers.push(StopTrigger {
            position: Vec2::new(x, y),
            wait,
        });
        self
    }

    fn npc(mut self, npc: Npc) -> Self {
        self.scenario.npcs.push(npc.script);
        self
    }

    fn build(self) -> Scenario {
        self.scenario
    }
}

struct Npc {
    script: NpcScript,
}

impl Npc {
    /// `path` entries are `(x, y, speed on the following segment)`.
    fn new(id: &str, spawn_time: f64, path: &[(f64, f64, f64)]) -> Self {
        Self {
            script: NpcScript {
                id: id.into(),
                spawn_time,
                waypoints: path
                    .iter()
                    .map(|&(x, y, speed)| NpcWaypoint { x, y, speed })
                    .collect(),
                max_accel: None,
                violation: false,
                half_length: 2.3,
                half_width: 1.0,
            },
        }
    }

    fn accel(mut self, a: f64) -> Self {
        self.script.max_accel = Some(a);
        self
    }

    fn violator(mut self) -> Self {
        self.script.violation = true;
        self
    }
}

/// Four-way intersection: the ego stops at its stop line, then a cross
/// vehicle runs its own stop sign as the ego pulls away. A follower closes
/// in from behind during the approach.
pub fn intersection_stop_violation() -> Scenario {
    Builder::new(
        "intersection_stop_violation",
        "ego stops at a four-way stop; a crossing vehicle from the left runs its stop sign as the ego proceeds",
    )
    .failure_prone()
    .tags(&["cross_traffic", "intersection", "violation", "rear_closer"])
    .road(4, 10.0)
    .route(&[(0.0, 0.0), (140.0, 0.0)])
    .ego(0.0, 0.0, 8.0)
    .stop(40.0, 0.0, 1.5)
    .npc(Npc::new("follower", 0.0, &[(-25.0, 0.0, 10.0), (12.0, 0.0, 0.0), (60.0, 0.0, 0.0)]).accel(3.0))
    .npc(Npc::new("violator", 5.3, &[(52.0, 40.0, 9.0), (52.0, -60.0, 9.0)]).violator())
    .duration(30.0)
    .build()
}

/// Open straight road with nothing else on it.
pub fn straight_empty() -> Scenario {
    Builder::new("straight_empty", "straight two-lane road, no other traffic")
        .tags(&["empty"])
        .ego(0.0, 0.0, 5.0)
        .duration(30.0)
        .build()
}

pub fn curve_empty() -> Scenario {
    Builder::new("curve_empty", "gentle left bend, no other traffic")
        .tags(&["empty", "curve"])
        .route(&[(0.0, 0.0), (40.0, 0.0), (70.0, 8.0), (95.0, 25.0), (115.0, 45.0)])
        .ego(0.0, 0.0, 6.0)
        .duration(30.0)
        .build()
}

pub fn stop_sign_clear() -> Scenario {
    Builder::new("stop_sign_clear", "single stop sign on an empty road")
        .tags(&["intersection"])
        .ego(0.0, 0.0, 8.0)
        .stop(50.0, 0.0, 2.0)
        .duration(35.0)
        .build()
}

pub fn lead_cruise() -> Scenario {
    Builder::new("lead_cruise", "slower lead vehicle well ahead, constant speed")
        .tags(&["lead"])
        .ego(0.0, 0.0, 8.0)
        .npc(Npc::new("lead", 0.0, &[(40.0, 0.0, 7.0), (400.0, 0.0, 7.0)]))
        .duration(30.0)
        .build()
}

pub fn lead_gentle_brake() -> Scenario {
    Builder::new(
        "lead_gentle_brake",
        "lead vehicle slows gradually to walking pace",
    )
    .tags(&["lead"])
    .ego(0.0, 0.0, 9.0)
    .npc(
        Npc::new(
            "lead",
            0.0,
            &[(35.0, 0.0, 9.0), (70.0, 0.0, 3.0), (400.0, 0.0, 3.0)],
        )
        .accel(1.5),
    )
    .duration(40.0)
    .build()
}

pub fn lead_hard_brake() -> Scenario {
    Builder::new("lead_hard_brake", "lead vehicle brakes firmly to a standstill")
        .tags(&["lead"])
        .ego(0.0, 0.0, 10.0)
        .npc(
            Npc::new(
                "lead",
                0.0,
                &[(16.0, 0.0, 10.0), (60.0, 0.0, 0.0), (400.0, 0.0, 0.0)],
            )
            .accel(4.0),
        )
        .duration(30.0)
        .build()
}

pub fn parked_in_lane() -> Scenario {
    Builder::new("parked_in_lane", "stationary vehicle blocking the lane far ahead")
        .tags(&["lead", "static"])
        .ego(0.0, 0.0, 8.0)
        .route(&[(0.0, 0.0), (70.0, 0.0)])
        .npc(Npc::new("parked", 0.0, &[(80.0, 0.0, 0.0), (85.0, 0.0, 0.0)]))
        .duration(30.0)
        .build()
}

pub fn cross_traffic_clear() -> Scenario {
    Builder::new(
        "cross_traffic_clear",
        "crossing vehicle clears the junction well before the ego arrives",
    )
    .tags(&["cross_traffic", "intersection"])
    .ego(0.0, 0.0, 8.0)
    .npc(Npc::new("crosser", 0.0, &[(60.0, 40.0, 9.0), (60.0, -60.0, 9.0)]))
    .duration(30.0)
    .build()
}

pub fn cross_traffic_behind() -> Scenario {
    Builder::new("cross_traffic_behind", "crossing vehicle passes behind the ego")
        .tags(&["cross_traffic", "intersection"])
        .ego(0.0, 0.0, 8.0)
        .npc(Npc::new("crosser", 2.0, &[(30.0, -40.0, 9.0), (30.0, 60.0, 9.0)]))
        .duration(30.0)
        .build()
}

pub fn cross_traffic_right_violation() -> Scenario {
    Builder::new(
        "cross_traffic_right_violation",
        "vehicle from the right runs a red light across the ego's path",
    )
    .failure_prone()
    .tags(&["cross_traffic", "intersection", "violation"])
    .road(4, 10.0)
    .ego(0.0, 0.0, 8.0)
    .npc(Npc::new("violator", 0.6, &[(60.0, -40.0, 8.0), (60.0, 60.0, 8.0)]).violator())
    .duration(30.0)
    .build()
}

pub fn rear_closer_slow() -> Scenario {
    Builder::new(
        "rear_closer_slow",
        "faster follower closes in and settles behind the ego",
    )
    .tags(&["rear_closer"])
    .ego(0.0, 0.0, 7.0)
    .npc(
        Npc::new(
            "follower",
            0.0,
            &[(-30.0, 0.0, 10.0), (-5.0, 0.0, 7.0), (400.0, 0.0, 7.0)],
        )
        .accel(2.0),
    )
    .duration(25.0)
    .build()
}

pub fn rear_closer_stop() -> Scenario {
    Builder::new(
        "rear_closer_stop",
        "follower approaches while the ego waits at a stop sign and stops short",
    )
    .tags(&["rear_closer", "intersection"])
    .ego(0.0, 0.0, 8.0)
    .stop(40.0, 0.0, 2.0)
    .npc(
        Npc::new(
            "follower",
            0.0,
            &[(-30.0, 0.0, 9.0), (15.0, 0.0, 0.0), (200.0, 0.0, 0.0)],
        )
        .accel(2.5),
    )
    .duration(30.0)
    .build()
}

pub fn adjacent_overtake() -> Scenario {
    Builder::new(
        "adjacent_overtake",
        "faster vehicle overtakes in the left lane without cutting in",
    )
    .tags(&["lateral"])
    .ego(0.0, 0.0, 7.0)
    .npc(Npc::new(
        "overtaker",
        0.0,
        &[(-25.0, 3.5, 11.0), (400.0, 3.5, 11.0)],
    ))
    .duration(25.0)
    .build()
}

pub fn oncoming_traffic() -> Scenario {
    Builder::new("oncoming_traffic", "oncoming vehicles pass in the opposite lane")
        .tags(&["lateral", "oncoming"])
        .ego(0.0, 0.0, 8.0)
        .npc(Npc::new(
            "oncoming_a",
            0.0,
            &[(120.0, 3.5, 8.0), (-100.0, 3.5, 8.0)],
        ))
        .npc(Npc::new(
            "oncoming_b",
            4.0,
            &[(150.0, 3.5, 9.0), (-100.0, 3.5, 9.0)],
        ))
        .duration(25.0)
        .build()
}

pub fn cut_in_far() -> Scenario {
    Builder::new(
        "cut_in_far",
        "slower vehicle changes into the ego lane with a generous gap",
    )
    .tags(&["lateral", "cut_in"])
    .ego(0.0, 0.0, 8.0)
    .npc(Npc::new(
        "cutter",
        0.0,
        &[
            (35.0, 3.5, 8.0),
            (55.0, 3.5, 8.0),
            (75.0, 0.0, 8.0),
            (400.0, 0.0, 8.0),
        ],
    ))
    .duration(30.0)
    .build()
}

pub fn cut_in_left_close() -> Scenario {
    Builder::new(
        "cut_in_left_close",
        "slow vehicle from the left lane cuts in just ahead and brakes",
    )
    .failure_prone()
    .tags(&["lateral", "cut_in"])
    .ego(0.0, 0.0, 9.0)
    .npc(
        Npc::new(
            "cutter",
            0.0,
            &[
                (15.0, 3.5, 4.0),
                (20.0, 3.5, 4.0),
                (42.0, 0.0, 2.0),
                (400.0, 0.0, 2.0),
            ],
        )
        .accel(6.0),
    )
    .duration(30.0)
    .build()
}

pub fn left_turn_across_path() -> Scenario {
    Builder::new(
        "left_turn_across_path",
        "oncoming vehicle turns left across the ego lane without yielding",
    )
    .failure_prone()
    .tags(&["cross_traffic", "oncoming", "violation"])
    .ego(0.0, 0.0, 8.0)
    .npc(
        Npc::new(
            "turner",
            0.65,
            &[
                (90.0, 1.75, 6.0),
                (66.0, 1.75, 6.0),
                (60.0, -3.0, 6.0),
                (58.0, -40.0, 6.0),
            ],
        )
        .violator(),
    )
    .duration(30.0)
    .build()
}

pub fn cut_in_right() -> Scenario {
    Builder::new(
        "cut_in_right",
        "vehicle merges in from the right at matching speed",
    )
    .tags(&["lateral", "cut_in"])
    .road(2, 10.0)
    .ego(0.0, 0.0, 8.0)
    .npc(Npc::new(
        "merger",
        0.0,
        &[
            (25.0, -3.5, 9.0),
            (45.0, -3.5, 9.0),
            (65.0, 0.0, 9.0),
            (400.0, 0.0, 9.0),
        ],
    ))
    .duration(30.0)
    .build()
}

pub fn slow_crosser() -> Scenario {
    Builder::new(
        "slow_crosser",
        "slow vehicle creeps across the junction and clears it before the ego",
    )
    .tags(&["cross_traffic", "intersection"])
    .ego(0.0, 0.0, 6.0)
    .npc(Npc::new("creeper", 0.0, &[(70.0, 12.0, 2.5), (70.0, -30.0, 2.5)]))
    .duration(35.0)
    .build()
}

pub fn multi_threat() -> Scenario {
    Builder::new(
        "multi_threat",
        "crossing violator from the left while a follower closes in and a faster car overtakes",
    )
    .failure_prone()
    .tags(&[
        "multi_threat",
        "cross_traffic",
        "rear_closer",
        "lateral",
        "violation",
    ])
    .road(4, 10.0)
    .ego(0.0, 0.0, 8.0)
    .npc(Npc::new("violator", 2.65, &[(80.0, 40.0, 8.0), (80.0, -60.0, 8.0)]).violator())
    .npc(Npc::new("follower", 0.0, &[(-30.0, 0.0, 9.0), (400.0, 0.0, 9.0)]))
    .npc(Npc::new(
        "overtaker",
        0.0,
        &[(-20.0, 3.5, 12.0), (400.0, 3.5, 12.0)],
    ))
    .duration(30.0)
    .build()
}

pub fn multi_benign() -> Scenario {
    Builder::new(
        "multi_benign",
        "lead, follower and oncoming traffic all keep their distance",
    )
    .tags(&["multi_threat", "lead", "rear_closer", "oncoming"])
    .ego(0.0, 0.0, 7.0)
    .npc(Npc::new("lead", 0.0, &[(45.0, 0.0, 8.0), (400.0, 0.0, 8.0)]))
    .npc(Npc::new("follower", 0.0, &[(-20.0, 0.0, 7.0), (400.0, 0.0, 7.0)]))
    .npc(Npc::new(
        "oncoming",
        3.0,
        &[(130.0, 3.5, 8.0), (-100.0, 3.5, 8.0)],
    ))
    .duration(30.0)
    .build()
}

pub fn curve_with_lead() -> Scenario {
    Builder::new("curve_with_lead", "lead vehicle ahead through a left bend")
        .tags(&["lead", "curve"])
        .route(&[(0.0, 0.0), (40.0, 0.0), (70.0, 8.0), (95.0, 25.0), (115.0, 45.0)])
        .ego(0.0, 0.0, 6.0)
        .npc(Npc::new(
            "lead",
            0.0,
            &[
                (30.0, 0.0, 6.0),
                (40.0, 0.0, 6.0),
                (70.0, 8.0, 6.0),
                (95.0, 25.0, 6.0),
                (130.0, 60.0, 6.0),
            ],
        ))
        .duration(30.0)
        .build()
}

pub fn builtin() -> Vec<Scenario> {
    vec![
        intersection_stop_violation(),
        straight_empty(),
        curve_empty(),
        stop_sign_clear(),
        lead_cruise(),
        lead_gentle_brake(),
        lead_hard_brake(),
        parked_in_lane(),
        cross_traffic_clear(),
        cross_traffic_behind(),
        cross_traffic_right_violation(),
        rear_closer_slow(),
        rear_closer_stop(),
        adjacent_overtake(),
        oncoming_traffic(),
        cut_in_far(),
        cut_in_left_close(),
        left_turn_across_path(),
        cut_in_right(),
        slow_crosser(),
        multi_threat(),
        multi_benign(),
        curve_with_lead(),
    ]
}

pub fn by_name(name: &str) -> Option<Scenario> {
    builtin().into_iter().find(|s| s.name == name)
}
