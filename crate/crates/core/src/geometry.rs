//! Ego-frame kinematics and the RSS-sized safety envelope.
//!
//! The body frame is x forward, y left; bearings are counter-clockwise from
//! the forward axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{wrap_angle, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoState {
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub accel: f64,
    pub half_length: f64,
    pub half_width: f64,
    pub wheelbase: f64,
}

impl EgoState {
    pub fn velocity(&self) -> Vec2 {
        Vec2::from_angle(self.heading) * self.speed
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.position.is_finite()
            && self.heading.is_finite()
            && self.speed.is_finite()
            && self.accel.is_finite();
        if !finite {
            return Err(Error::InvalidState("ego state has non-finite fields".into()));
        }
        if self.speed < 0.0 {
            return Err(Error::InvalidState(format!("ego speed {} < 0", self.speed)));
        }
        if !(self.half_length > 0.0 && self.half_width > 0.0 && self.wheelbase > 0.0) {
            return Err(Error::InvalidState(
                "ego extents and wheelbase must be > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub id: String,
    pub position: Vec2,
    pub velocity: Vec2,
    pub heading: f64,
    pub half_length: f64,
    pub half_width: f64,
}

impl ObjectState {
    pub fn validate(&self) -> Result<()> {
        if !(self.position.is_finite() && self.velocity.is_finite() && self.heading.is_finite()) {
            return Err(Error::InvalidState(format!(
                "object {} has non-finite fields",
                self.id
            )));
        }
        if !(self.half_length > 0.0 && self.half_width > 0.0) {
            return Err(Error::InvalidState(format!(
                "object {} extents must be > 0",
                self.id
            )));
        }
        Ok(())
    }
}

/// Object position and velocity relative to the ego, in the ego body frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeKinematics {
    pub dp_lon: f64,
    pub dp_lat: f64,
    pub v_lon: f64,
    pub v_lat: f64,
    /// Bearing of the object centre, (-pi, pi].
    pub bearing: f64,
    /// Absolute heading difference in degrees, [0, 180].
    pub theta_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadContext {
    pub v_limit: f64,
    pub lanes: u32,
    pub lane_width: f64,
}

impl RoadContext {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_limit > 0.0 && self.v_limit.is_finite()) {
            return Err(Error::Domain(format!(
                "v_limit must be > 0, got {}",
                self.v_limit
            )));
        }
        if self.lanes < 1 {
            return Err(Error::Domain("lane count must be >= 1".into()));
        }
        if !(self.lane_width > 0.0) {
            return Err(Error::Domain(format!(
                "lane_width must be > 0, got {}",
                self.lane_width
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RssParams {
    pub t_reaction: f64,
    pub a_max: f64,
    pub a_min: f64,
}

impl Default for RssParams {
    fn default() -> Self {
        Self {
            t_reaction: 0.5,
            a_max: 3.5,
            a_min: 4.0,
        }
    }
}

impl RssParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_reaction", self.t_reaction),
            ("a_max", self.a_max),
            ("a_min", self.a_min),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("rss.{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Shape constants of the envelope that the RSS formula does not fix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvelopeParams {
    /// Rear extent as a fraction of the forward extent.
    pub rear_fraction: f64,
    pub lateral_margin: f64,
    /// Floor for the forward extent, keeps the envelope open at standstill.
    pub min_forward: f64,
}

impl Default for EnvelopeParams {
    fn default() -> Self {
        Self {
            rear_fraction: 0.5,
            lateral_margin: 0.5,
            min_forward: 5.0,
        }
    }
}

impl EnvelopeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rear_fraction >= 0.0 && self.rear_fraction.is_finite()) {
            return Err(Error::Config("envelope.rear_fraction must be >= 0".into()));
        }
        if !(self.lateral_margin >= 0.0 && self.lateral_margin.is_finite()) {
            return Err(Error::Config("envelope.lateral_margin must be >= 0".into()));
        }
        if !(self.min_forward >= 0.0 && self.min_forward.is_finite()) {
            return Err(Error::Config("envelope.min_forward must be >= 0".into()));
        }
        Ok(())
    }
}

/// Axis-aligned region in the ego frame; boundaries are closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub d_rss: f64,
    pub forward: f64,
    pub rear: f64,
    pub lateral: f64,
}

impl Envelope {
    pub fn contains(&self, dp_lon: f64, dp_lat: f64) -> bool {
        dp_lon <= self.forward && dp_lon >= -self.rear && dp_lat.abs() <= self.lateral
    }
}

pub fn to_ego_frame(ego: &EgoState, obj: &ObjectState) -> Result<RelativeKinematics> {
    if !(ego.position.is_finite() && ego.heading.is_finite() && ego.speed.is_finite()) {
        return Err(Error::InvalidState("ego state has non-finite fields".into()));
    }
    if !(obj.position.is_finite() && obj.velocity.is_finite() && obj.heading.is_finite()) {
        return Err(Error::InvalidState(format!(
            "object {} has non-finite fields",
            obj.id
        )));
    }
    let dp = (obj.position - ego.position).rotate(-ego.heading);
    let dv = (obj.velocity - ego.velocity()).rotate(-ego.heading);
    let theta = wrap_angle(obj.heading - ego.heading).abs().to_degrees();
    Ok(RelativeKinematics {
        dp_lon: dp.x,
        dp_lat: dp.y,
        v_lon: dv.x,
        v_lat: dv.y,
        bearing: dp.y.atan2(dp.x),
        theta_deg: theta.min(180.0),
    })
}

/// RSS minimum safe longitudinal distance, clamped at zero.
pub fn rss_distance(v_ego: f64, v_front: f64, p: &RssParams) -> f64 {
    let t = p.t_reaction;
    let v_reacted = v_ego + t * p.a_max;
    let raw =
        v_ego * t + 0.5 * p.a_max * t * t + (v_reacted * v_reacted - v_front * v_front) / (2.0 * p.a_min);
    raw.max(0.0)
}

pub fn build_envelope(
    ego: &EgoState,
    road: &RoadContext,
    rss: &RssParams,
    shape: &EnvelopeParams,
    lead_speed: f64,
) -> Envelope {
    let d_rss = rss_distance(ego.speed, lead_speed, rss);
    let forward = d_rss.max(shape.min_forward);
    Envelope {
        d_rss,
        forward,
        rear: forward * shape.rear_fraction,
        lateral: f64::from(road.lanes) * road.lane_width / 2.0 + shape.lateral_margin,
    }
}

/// Longitudinal speed of the nearest object ahead inside the lateral
/// corridor `half_width`, or `None` when nothing leads the ego.
pub fn lead_speed(ego: &EgoState, objects: &[ObjectState], half_width: f64) -> Option<f64> {
    let forward = Vec2::from_angle(ego.heading);
    objects
        .iter()
        .filter_map(|o| {
            let dp = (o.position - ego.position).rotate(-ego.heading);
            (dp.x > 0.0 && dp.y.abs() <= half_width).then_some((dp.x, o.velocity.dot(forward)))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, v)| v.max(0.0))
}

pub fn filter_objects<'a>(
    ego: &EgoState,
    objects: &'a [ObjectState],
    env: &Envelope,
) -> Result<Vec<(&'a ObjectState, RelativeKinematics)>> {
    let mut kept = Vec::with_capacity(objects.len());
    for obj in objects {
        let rel = to_ego_frame(ego, obj)?;
        if env.contains(rel.dp_lon, rel.dp_lat) {
            kept.push((obj, rel));
        }
    }
    Ok(kept)
}
