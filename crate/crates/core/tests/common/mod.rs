#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use cri_core::control::{ControlCommand, DrivingMode};
use cri_core::geometry::{EgoState, ObjectState, RoadContext};
use cri_core::math::Vec2;
use cri_core::sim::collision::Obb;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Frozen output of tools/derive_oracles.py (mpmath, 50 digits).
#[allow(clippy::excessive_precision)]
pub mod oracle {
    pub const ORIENTATION_0: f64 = 0.024471741852423214;
    pub const ORIENTATION_91_125: f64 = 1.0;
    pub const ORIENTATION_45: f64 = 0.56958655048003272;
    pub const DIRECTIONAL_10_M5: f64 = 0.13533533737072599;
    pub const DIRECTIONAL_HALF: f64 = 0.36788017692958891;
    pub const SPEED_AT_LIMIT_2_LANES: f64 = 0.73105857863000488;
    pub const SPEED_0_8_1_LANE: f64 = 0.18242552380635634;
    pub const SPEED_1_2_3_LANES: f64 = 0.97068776924864368;
    pub const FUSE_HALVES: f64 = 0.875;
    pub const OBJECT_CRI_EXAMPLE: f64 = 0.58269336481105148;
    pub const ASSESS_EXAMPLE: f64 = 0.066290187687641123;
    pub const RSS_20_15: f64 = 41.4453125;
    pub const RSS_0_0: f64 = 0.8203125;
    pub const RSS_0_30: f64 = 0.0;
    pub const FUSED_ORTHOGONAL: f64 = 0.77396969619669992;
}

pub fn rel_close(actual: f64, expected: f64, rel: f64) -> bool {
    if expected == 0.0 {
        actual.abs() <= rel
    } else {
        ((actual - expected) / expected).abs() <= rel
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn corpus_dir() -> PathBuf {
    workspace_root().join("scenarios")
}

pub fn ego(speed: f64, heading: f64) -> EgoState {
    EgoState {
        position: Vec2::new(0.0, 0.0),
        heading,
        speed,
        accel: 0.0,
        half_length: 2.3,
        half_width: 1.0,
        wheelbase: 2.9,
    }
}

pub fn random_ego<R: Rng>(r: &mut R) -> EgoState {
    EgoState {
        position: Vec2::new(r.gen_range(-100.0..100.0), r.gen_range(-100.0..100.0)),
        heading: r.gen_range(-PI..PI),
        speed: r.gen_range(0.0..40.0),
        accel: r.gen_range(-8.0..4.0),
        half_length: 2.3,
        half_width: 1.0,
        wheelbase: 2.9,
    }
}

pub fn random_object<R: Rng>(r: &mut R, ego: &EgoState, id: usize) -> ObjectState {
    let offset = Vec2::new(r.gen_range(-60.0..60.0), r.gen_range(-15.0..15.0));
    // occasionally exactly stationary or co-located
    let velocity = if r.gen_bool(0.1) {
        Vec2::new(0.0, 0.0)
    } else {
        Vec2::new(r.gen_range(-30.0..30.0), r.gen_range(-30.0..30.0))
    };
    let position = if r.gen_bool(0.01) {
        ego.position
    } else {
        ego.position + offset
    };
    ObjectState {
        id: format!("o{id}"),
        position,
        velocity,
        heading: r.gen_range(-PI..PI),
        half_length: 2.3,
        half_width: 1.0,
    }
}

pub fn random_road<R: Rng>(r: &mut R) -> RoadContext {
    RoadContext {
        v_limit: r.gen_range(3.0..35.0),
        lanes: r.gen_range(1..=5),
        lane_width: r.gen_range(2.5..4.0),
    }
}

pub fn random_command<R: Rng>(r: &mut R) -> ControlCommand {
    // the baseline never throttles and brakes at once, but the adapter must
    // not rely on that
    let (throttle, brake) = match r.gen_range(0..3) {
        0 => (r.gen_range(0.0..=1.0), 0.0),
        1 => (0.0, r.gen_range(0.0..=1.0)),
        _ => (r.gen_range(0.0..=1.0), r.gen_range(0.0..=1.0)),
    };
    ControlCommand::new(throttle, brake, r.gen_range(-1.0..=1.0))
}

pub fn random_sectors<R: Rng>(r: &mut R) -> [f64; 8] {
    let mut s = [0.0; 8];
    for v in &mut s {
        if r.gen_bool(0.6) {
            *v = r.gen_range(0.0..=1.0);
        }
    }
    s
}

pub const MODES: [DrivingMode; 3] = [
    DrivingMode::Aggressive,
    DrivingMode::Neutral,
    DrivingMode::Conservative,
];

pub fn random_box<R: Rng>(r: &mut R) -> Obb {
    Obb::new(
        Vec2::new(r.gen_range(-6.0..6.0), r.gen_range(-6.0..6.0)),
        r.gen_range(-PI..PI),
        r.gen_range(0.3..3.0),
        r.gen_range(0.3..2.0),
    )
}

/// Point-in-rectangle by explicit half-plane tests in the box's own frame.
fn inside(b: &Obb, px: f64, py: f64) -> bool {
    let (s, c) = b.heading.sin_cos();
    let (dx, dy) = (px - b.center.x, py - b.center.y);
    let u = dx * c + dy * s;
    let v = -dx * s + dy * c;
    u.abs() <= b.half_length && v.abs() <= b.half_width
}

fn perimeter(b: &Obb, spacing: f64) -> Vec<(f64, f64)> {
    let (s, c) = b.heading.sin_cos();
    let (hl, hw) = (b.half_length, b.half_width);
    let local = [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)];
    let world: Vec<(f64, f64)> = local
        .iter()
        .map(|&(u, v)| (b.center.x + u * c - v * s, b.center.y + u * s + v * c))
        .collect();
    let mut pts = Vec::new();
    for i in 0..4 {
        let (a, z) = (world[i], world[(i + 1) % 4]);
        let len = ((z.0 - a.0).powi(2) + (z.1 - a.1).powi(2)).sqrt();
        let n = (len / spacing).ceil() as usize;
        for k in 0..=n {
            let t = k as f64 / n as f64;
            pts.push((a.0 + (z.0 - a.0) * t, a.1 + (z.1 - a.1) * t));
        }
    }
    pts
}

/// Two convex boxes meet iff a boundary point of one lies in the other;
/// the boundary is sampled every `spacing` metres.
pub fn sampled_overlap(a: &Obb, b: &Obb, spacing: f64) -> bool {
    perimeter(a, spacing).iter().any(|&(x, y)| inside(b, x, y))
        || perimeter(b, spacing).iter().any(|&(x, y)| inside(a, x, y))
}

pub fn grown(b: &Obb, by: f64) -> Obb {
    Obb::new(b.center, b.heading, b.half_length + by, b.half_width + by)
}

pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * p).round() as usize;
    sorted[idx]
}
