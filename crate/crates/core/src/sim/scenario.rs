//! Scenario documents: JSON files tagged with a schema version.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec2;

pub const SCHEMA: &str = "cri-scenario/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Baseline is known to collide here.
    #[serde(default)]
    pub failure_prone: bool,
    #[serde(default)]
    pub tags: Vec<String>,
    pub map: MapSpec,
    pub ego: EgoStart,
    #[serde(default)]
    pub npcs: Vec<NpcScript>,
    #[serde(default)]
    pub stop_triggers: Vec<StopTrigger>,
    pub duration_limit: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub lanes: u32,
    pub lane_width: f64,
    pub speed_limit: f64,
    pub route: Vec<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoStart {
    pub position: Vec2,
    /// Defaults to the direction of the first route segment.
    #[serde(default)]
    pub heading: Option<f64>,
    #[serde(default)]
    pub speed: f64,
    #[serde(default = "default_half_length")]
    pub half_length: f64,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_wheelbase")]
    pub wheelbase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NpcWaypoint {
    pub x: f64,
    pub y: f64,
    /// Target speed on the segment that starts here.
    pub speed: f64,
}

impl NpcWaypoint {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NpcScript {
    pub id: String,
    #[serde(default)]
    pub spawn_time: f64,
    pub waypoints: Vec<NpcWaypoint>,
    /// Rate limit on speed changes between segments; `None` means instant.
    #[serde(default)]
    pub max_accel: Option<f64>,
    /// Marks scripted rule violations (e.g. running a stop sign).
    #[serde(default)]
    pub violation: bool,
    #[serde(default = "default_half_length")]
    pub half_length: f64,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopTrigger {
    pub position: Vec2,
    /// Seconds the baseline waits at the stop before resuming.
    #[serde(default = "default_wait")]
    pub wait: f64,
}

fn default_half_length() -> f64 {
    2.3
}

fn default_half_width() -> f64 {
    1.0
}

fn default_wheelbase() -> f64 {
    2.9
}

fn default_wait() -> f64 {
    2.0
}

fn invalid(field: impl Into<String>, msg: impl std::fmt::Display) -> Error {
    Error::Scenario(format!("{}: {msg}", field.into()))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be > 0, got {v}")))
    }
}

fn finite_point(field: &str, p: Vec2) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, "coordinates must be finite"))
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text)
            .map_err(|e| Error::Scenario(format!("line {} column {}: {e}", e.line(), e.column())))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
            .map_err(|e| Error::Scenario(format!("{}: {}", path.display(), strip_prefix(e))))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(invalid(
                "schema",
                format!("expected {SCHEMA:?}, got {:?}", self.schema),
            ));
        }
        if self.name.is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        positive("dt", self.dt)?;
        positive("duration_limit", self.duration_limit)?;
        if self.map.lanes < 1 {
            return Err(invalid("map.lanes", "must be >= 1"));
        }
        positive("map.lane_width", self.map.lane_width)?;
        positive("map.speed_limit", self.map.speed_limit)?;
        if self.map.route.len() < 2 {
            return Err(invalid("map.route", "needs at least 2 waypoints"));
        }
        for (i, (a, b)) in self.map.route.iter().zip(&self.map.route[1..]).enumerate() {
            finite_point(&format!("map.route[{i}]"), *a)?;
            finite_point(&format!("map.route[{}]", i + 1), *b)?;
            if (*b - *a).norm() <= 1e-9 {
                return Err(invalid(
                    format!("map.route[{}]", i + 1),
                    "repeats the previous waypoint",
                ));
            }
        }
        finite_point("ego.position", self.ego.position)?;
        if let Some(h) = self.ego.heading {
            if !h.is_finite() {
                return Err(invalid("ego.heading", "must be finite"));
            }
        }
        if !(self.ego.speed >= 0.0 && self.ego.speed.is_finite()) {
            return Err(invalid("ego.speed", "must be >= 0"));
        }
        positive("ego.half_length", self.ego.half_length)?;
        positive("ego.half_width", self.ego.half_width)?;
        positive("ego.wheelbase", self.ego.wheelbase)?;

        let mut ids = std::collections::BTreeSet::new();
        for (i, npc) in self.npcs.iter().enumerate() {
            let at = |f: &str| format!("npcs[{i}].{f}");
            if !ids.insert(npc.id.as_str()) {
                return Err(invalid(at("id"), format!("duplicate id {:?}", npc.id)));
            }
            if !(npc.spawn_time >= 0.0 && npc.spawn_time.is_finite()) {
                return Err(invalid(at("spawn_time"), "must be >= 0"));
            }
            if npc.waypoints.len() < 2 {
                return Err(invalid(at("waypoints"), "needs at least 2 waypoints"));
            }
            for (j, wp) in npc.waypoints.iter().enumerate() {
                finite_point(&at(&format!("waypoints[{j}]")), wp.position())?;
                if !(wp.speed >= 0.0 && wp.speed.is_finite()) {
                    return Err(invalid(at(&format!("waypoints[{j}].speed")), "must be >= 0"));
                }
                if j > 0 && (wp.position() - npc.waypoints[j - 1].position()).norm() <= 1e-9 {
                    return Err(invalid(
                        at(&format!("waypoints[{j}]")),
                        "repeats the previous waypoint",
                    ));
                }
            }
            if let Some(a) = npc.max_accel {
                positive(&at("max_accel"), a)?;
            }
            positive(&at("half_length"), npc.half_length)?;
            positive(&at("half_width"), npc.half_width)?;
        }
        for (i, stop) in self.stop_triggers.iter().enumerate() {
            finite_point(&format!("stop_triggers[{i}].position"), stop.position)?;
            if !(stop.wait >= 0.0 && stop.wait.is_finite()) {
                return Err(invalid(format!("stop_triggers[{i}].wait"), "must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn ego_heading(&self) -> f64 {
        self.ego.heading.unwrap_or_else(|| {
            let d = self.map.route[1] - self.map.route[0];
            d.y.atan2(d.x)
        })
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Scenario(msg) => msg,
        other => other.to_string(),
    }
}
