//! Eight-sector directional risk map and vector-max fusion.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use serde::{Deserialize, Serialize};

use crate::math::wrap_angle;
use crate::risk::ObjectRisk;

pub const SECTORS: usize = 8;

/// Centre angle of sector `d`; sector 0 points along the ego forward axis.
pub fn sector_center(d: usize) -> f64 {
    d as f64 * FRAC_PI_4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorField {
    pub r: [f64; SECTORS],
    pub r_vector: f64,
    pub r_max: f64,
    pub cri_final_raw: f64,
    pub cri_final: f64,
    pub dominant_sector: usize,
    pub theta_star: f64,
    pub r_star: f64,
}

impl SectorField {
    /// A field holding only per-sector risks; [`fuse`] completes it.
    pub fn from_sectors(r: [f64; SECTORS]) -> Self {
        Self {
            r,
            r_vector: 0.0,
            r_max: 0.0,
            cri_final_raw: 0.0,
            cri_final: 0.0,
            dominant_sector: 0,
            theta_star: 0.0,
            r_star: 0.0,
        }
    }

    pub fn empty() -> Self {
        Self::from_sectors([0.0; SECTORS])
    }

    /// |theta*| <= pi/4
    pub fn dominant_is_frontal(&self) -> bool {
        matches!(self.dominant_sector, 0 | 1 | 7)
    }

    /// |theta*| in (pi/4, 3pi/4)
    pub fn dominant_is_lateral(&self) -> bool {
        matches!(self.dominant_sector, 2 | 6)
    }
}

/// Sector `d` covers the half-open interval [d*pi/4 - pi/8, d*pi/4 + pi/8).
pub fn assign_sector(bearing: f64) -> usize {
    let shifted = (bearing + FRAC_PI_8).rem_euclid(2.0 * PI);
    ((shifted / FRAC_PI_4).floor() as usize) % SECTORS
}

pub fn aggregate(objects: &[ObjectRisk]) -> SectorField {
    let mut r = [0.0f64; SECTORS];
    for obj in objects {
        let d = assign_sector(obj.bearing);
        r[d] = r[d].max(obj.cri);
    }
    SectorField::from_sectors(r)
}

pub fn fuse(field: &SectorField, beta: f64) -> SectorField {
    let r = field.r;
    let (sx, sy) = r.iter().enumerate().fold((0.0, 0.0), |(sx, sy), (d, &rd)| {
        let (s, c) = sector_center(d).sin_cos();
        (sx + rd * c, sy + rd * s)
    });
    let r_vector = sx.hypot(sy);
    // ties go to the smallest index
    let mut dominant = 0;
    for d in 1..SECTORS {
        if r[d] > r[dominant] {
            dominant = d;
        }
    }
    let r_max = r[dominant];
    let cri_final_raw = beta * r_vector + (1.0 - beta) * r_max;
    SectorField {
        r,
        r_vector,
        r_max,
        cri_final_raw,
        cri_final: cri_final_raw.clamp(0.0, 1.0),
        dominant_sector: dominant,
        theta_star: wrap_angle(sector_center(dominant)),
        r_star: r_max,
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::risk::RiskFactors;

    fn obj(bearing: f64, cri: f64) -> ObjectRisk {
        ObjectRisk {
            id: String::new(),
            factors: RiskFactors {
                f_orientation: 0.0,
                f_lon: 0.0,
                f_lat: 0.0,
                f_speed: 0.0,
                f_spatial: 0.0,
                ttc_lon: f64::INFINITY,
                ttc_lat: f64::INFINITY,
            },
            cri,
            bearing,
        }
    }

    #[test]
    fn sector_assignment() {
        assert_eq!(assign_sector(0.0), 0);
        assert_eq!(assign_sector(44f64.to_radians()), 1);
        // lower edge closed, upper edge open
        assert_eq!(assign_sector(-FRAC_PI_8), 0);
        assert_eq!(assign_sector(FRAC_PI_8), 1);
        assert_eq!(assign_sector(-FRAC_PI_8 - 1e-9), 7);
        assert_eq!(assign_sector(-23f64.to_radians()), 7);
        assert_eq!(assign_sector(PI), 4);
        assert_eq!(assign_sector(-PI + 1e-9), 4);
        assert_eq!(assign_sector(-PI / 2.0), 6);
        assert_eq!(assign_sector(PI / 2.0), 2);
    }

    #[test]
    fn aggregation() {
        assert_eq!(aggregate(&[]).r, [0.0; SECTORS]);
        let f = aggregate(&[obj(0.0, 0.3), obj(0.1, 0.7)]);
        assert_eq!(f.r[0], 0.7);
        let all: Vec<ObjectRisk> = (0..SECTORS)
            .map(|d| obj(wrap_angle(sector_center(d)), 0.1 * d as f64))
            .collect();
        let f = aggregate(&all);
        for d in 0..SECTORS {
            assert_eq!(f.r[d], 0.1 * d as f64);
        }
    }

    #[test]
    fn fuse_examples() {
        let mut r = [0.0; SECTORS];
        r[0] = 0.8;
        let f = fuse(&SectorField::from_sectors(r), 0.7);
        assert_abs_diff_eq!(f.r_vector, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(f.cri_final, 0.8, epsilon = 1e-15);

        let mut r = [0.0; SECTORS];
        r[0] = 0.5;
        r[4] = 0.5;
        let f = fuse(&SectorField::from_sectors(r), 0.7);
        assert_abs_diff_eq!(f.r_vector, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.cri_final, 0.15, epsilon = 1e-12);
        assert_eq!(f.dominant_sector, 0);

        let mut r = [0.0; SECTORS];
        r[0] = 0.6;
        r[2] = 0.6;
        let f = fuse(&SectorField::from_sectors(r), 0.7);
        assert_abs_diff_eq!(f.r_vector, 0.848528137423857, epsilon = 1e-12);
        assert_abs_diff_eq!(f.cri_final, 0.7739696961967, epsilon = 1e-12);
    }

    #[test]
    fn empty_field_defaults_to_front() {
        let f = fuse(&SectorField::empty(), 0.7);
        assert_eq!(f.dominant_sector, 0);
        assert_eq!(f.r_star, 0.0);
        assert_eq!(f.cri_final, 0.0);
    }

    #[test]
    fn raw_value_kept_when_clamped() {
        let mut r = [0.0; SECTORS];
        r[7] = 1.0;
        r[0] = 1.0;
        r[1] = 1.0;
        let f = fuse(&SectorField::from_sectors(r), 0.7);
        assert!(f.cri_final_raw > 1.0);
        assert_eq!(f.cri_final, 1.0);
    }

    #[test]
    fn theta_star_wraps() {
        let mut r = [0.0; SECTORS];
        r[6] = 0.4;
        let f = fuse(&SectorField::from_sectors(r), 0.7);
        assert_abs_diff_eq!(f.theta_star, -PI / 2.0, epsilon = 1e-15);
        assert!(f.dominant_is_lateral());
    }
}
