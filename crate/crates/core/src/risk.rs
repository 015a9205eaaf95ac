//! Per-object risk factors and their fusion into a single object CRI.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{EgoState, RelativeKinematics, RoadContext, RssParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RiskParams {
    /// Keeps TTC finite when the closing speed vanishes.
    pub epsilon: f64,
    /// Weight of the noisy-or term against the single largest factor.
    pub alpha: f64,
    /// Neutrality point of the speed modulation.
    pub speed_ref: f64,
    pub rss: RssParams,
}

impl Default for RiskParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            alpha: 0.7,
            speed_ref: 0.5,
            rss: RssParams::default(),
        }
    }
}

impl RiskParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "risk.epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "risk.alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.speed_ref) {
            return Err(Error::Config(format!(
                "risk.speed_ref must be in [0, 1], got {}",
                self.speed_ref
            )));
        }
        self.rss.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskFactors {
    pub f_orientation: f64,
    pub f_lon: f64,
    pub f_lat: f64,
    pub f_speed: f64,
    pub f_spatial: f64,
    /// `f64::INFINITY` when the axis is not closing.
    pub ttc_lon: f64,
    pub ttc_lat: f64,
}

impl RiskFactors {
    pub fn max_spatial(&self) -> f64 {
        self.f_orientation.max(self.f_lon).max(self.f_lat)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectRisk {
    pub id: String,
    pub factors: RiskFactors,
    pub cri: f64,
    pub bearing: f64,
}

/// Orientation risk for a heading difference `theta_deg` in degrees.
///
/// Peaks at 1 for theta = 91.125 deg (crossing traffic), stays near zero
/// for parallel and anti-parallel traffic.
pub fn orientation_risk(theta_deg: f64) -> Result<f64> {
    if !(0.0..=180.0).contains(&theta_deg) {
        return Err(Error::Domain(format!("theta {theta_deg} outside [0, 180] deg")));
    }
    Ok(0.5 * (1.0 - (theta_deg * PI / 101.25 + PI / 10.0).cos()))
}

/// Negative iff separation along the axis is shrinking.
pub fn approach_product(dp: f64, v: f64) -> f64 {
    dp * v
}

/// Returns `(f, ttc)` for one body axis.
pub fn directional_risk(dp: f64, v: f64, epsilon: f64) -> (f64, f64) {
    if approach_product(dp, v) >= 0.0 {
        return (0.0, f64::INFINITY);
    }
    let ttc = dp.abs() / (v.abs() + epsilon);
    ((-ttc).exp(), ttc)
}

pub fn speed_risk(v_ego: f64, road: &RoadContext) -> Result<f64> {
    if !(road.v_limit > 0.0) {
        return Err(Error::Domain(format!(
            "v_limit must be > 0, got {}",
            road.v_limit
        )));
    }
    let z = 5.0 * (v_ego - road.v_limit) / road.v_limit + 1.5 * f64::from(road.lanes) - 2.0;
    Ok(1.0 / (1.0 + (-z).exp()))
}

/// Noisy-or combination of the spatial factors.
pub fn fuse_spatial(f_orientation: f64, f_lon: f64, f_lat: f64) -> Result<f64> {
    let fs = [f_orientation, f_lon, f_lat];
    if let Some(bad) = fs.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::Domain(format!("risk factor {bad} outside [0, 1]")));
    }
    let largest = fs.iter().copied().fold(0.0, f64::max);
    // the product form can round an ulp below the largest factor
    Ok((1.0 - fs.iter().map(|f| 1.0 - f).product::<f64>()).max(largest))
}

/// Blends noisy-or and max, then scales by the speed modulation
/// `exp(f_speed - speed_ref) / exp(speed_ref)`. Clamped to [0, 1].
pub fn object_cri(factors: &RiskFactors, params: &RiskParams) -> f64 {
    let bracket = params.alpha * factors.f_spatial + (1.0 - params.alpha) * factors.max_spatial();
    let modulation = (factors.f_speed - params.speed_ref).exp() / params.speed_ref.exp();
    (bracket * modulation).clamp(0.0, 1.0)
}

pub fn assess_object(
    id: &str,
    ego: &EgoState,
    rel: &RelativeKinematics,
    road: &RoadContext,
    params: &RiskParams,
) -> Result<ObjectRisk> {
    let f_orientation = orientation_risk(rel.theta_deg)?;
    let (f_lon, ttc_lon) = directional_risk(rel.dp_lon, rel.v_lon, params.epsilon);
    let (f_lat, ttc_lat) = directional_risk(rel.dp_lat, rel.v_lat, params.epsilon);
    let f_speed = speed_risk(ego.speed, road)?;
    let f_spatial = fuse_spatial(f_orientation, f_lon, f_lat)?;
    let factors = RiskFactors {
        f_orientation,
        f_lon,
        f_lat,
        f_speed,
        f_spatial,
        ttc_lon,
        ttc_lat,
    };
    Ok(ObjectRisk {
        id: id.to_owned(),
        factors,
        cri: object_cri(&factors, params),
        bearing: rel.bearing,
    })
}
