//! Oriented-box overlap by the separating axis test.

use serde::{Deserialize, Serialize};

use crate::math::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obb {
    pub center: Vec2,
    pub heading: f64,
    pub half_length: f64,
    pub half_width: f64,
}

impl Obb {
    pub fn new(center: Vec2, heading: f64, half_length: f64, half_width: f64) -> Self {
        Self {
            center,
            heading,
            half_length,
            half_width,
        }
    }

    pub fn axes(&self) -> [Vec2; 2] {
        let u = Vec2::from_angle(self.heading);
        [u, Vec2::new(-u.y, u.x)]
    }

    pub fn corners(&self) -> [Vec2; 4] {
        let [u, v] = self.axes();
        let a = u * self.half_length;
        let b = v * self.half_width;
        let c = self.center;
        [c + a + b, c - a + b, c - a - b, c + a - b]
    }

    /// Half-extent of the box projected on a unit axis.
    fn radius_on(&self, axis: Vec2) -> f64 {
        let [u, v] = self.axes();
        self.half_length * u.dot(axis).abs() + self.half_width * v.dot(axis).abs()
    }

    /// Closed test: boxes that only touch count as overlapping.
    pub fn overlaps(&self, other: &Obb) -> bool {
        let d = other.center - self.center;
        self.axes()
            .into_iter()
            .chain(other.axes())
            .all(|axis| d.dot(axis).abs() <= self.radius_on(axis) + other.radius_on(axis))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let [u, v] = self.axes();
        let d = p - self.center;
        d.dot(u).abs() <= self.half_length && d.dot(v).abs() <= self.half_width
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub npc: String,
}

/// Emits one event per continuous contact episode with each NPC.
#[derive(Debug, Clone, Default)]
pub struct ContactTracker {
    in_contact: Vec<bool>,
}

impl ContactTracker {
    pub fn new(npcs: usize) -> Self {
        Self {
            in_contact: vec![false; npcs],
        }
    }

    /// `boxes[i]` is `None` when NPC `i` is not in the world this tick.
    pub fn update(&mut self, ego: &Obb, boxes: &[(&str, Option<Obb>)]) -> Vec<CollisionEvent> {
        if self.in_contact.len() < boxes.len() {
            self.in_contact.resize(boxes.len(), false);
        }
        let mut events = Vec::new();
        for (i, (id, b)) in boxes.iter().enumerate() {
            let touching = b.is_some_and(|b| ego.overlaps(&b));
            if touching && !self.in_contact[i] {
                events.push(CollisionEvent {
                    npc: (*id).to_owned(),
                });
            }
            self.in_contact[i] = touching;
        }
        events
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use super::*;

    #[test]
    fn identical_boxes_collide() {
        let a = Obb::new(Vec2::new(3.0, -1.0), 0.4, 2.0, 1.0);
        assert!(a.overlaps(&a));
    }

    #[test]
    fn far_boxes_do_not_collide() {
        let a = Obb::new(Vec2::ZERO, 0.3, 2.0, 1.0);
        let b = Obb::new(Vec2::new(4.5, 0.1), 1.2, 2.0, 1.0);
        let diag = 2.0f64.hypot(1.0);
        assert!((b.center - a.center).norm() > 2.0 * diag);
        assert!(!a.overlaps(&b));
    }

    #[test]
    fn exact_touching_counts_as_collision() {
        let a = Obb::new(Vec2::ZERO, 0.0, 1.0, 1.0);
        let b = Obb::new(Vec2::new(2.0, 0.0), 0.0, 1.0, 1.0);
        assert!(a.overlaps(&b));
        let c = Obb::new(Vec2::new(2.0 + 1e-9, 0.0), 0.0, 1.0, 1.0);
        assert!(!a.overlaps(&c));
    }

    #[test]
    fn corner_graze_against_rotated_box() {
        // diamond whose left vertex touches the right face of a unit square
        let a = Obb::new(Vec2::ZERO, 0.0, 1.0, 1.0);
        let r = 2f64.sqrt() / 2.0;
        let touch = Obb::new(Vec2::new(1.0 + 1.0, 0.0), FRAC_PI_4, r, r);
        assert!(a.overlaps(&touch));
        let gap = Obb::new(Vec2::new(2.01, 0.0), FRAC_PI_4, r, r);
        assert!(!a.overlaps(&gap));
    }

    #[test]
    fn tracker_counts_each_episode_once() {
        let ego = Obb::new(Vec2::ZERO, 0.0, 2.0, 1.0);
        let hit = Some(Obb::new(Vec2::new(1.0, 0.0), 0.0, 2.0, 1.0));
        let miss = Some(Obb::new(Vec2::new(20.0, 0.0), 0.0, 2.0, 1.0));
        let mut t = ContactTracker::new(2);
        assert_eq!(t.update(&ego, &[("a", hit), ("b", None)]).len(), 1);
        assert!(t.update(&ego, &[("a", hit), ("b", None)]).is_empty());
        assert!(t.update(&ego, &[("a", miss), ("b", None)]).is_empty());
        let ev = t.update(&ego, &[("a", hit), ("b", hit)]);
        assert_eq!(
            ev,
            vec![
                CollisionEvent { npc: "a".into() },
                CollisionEvent { npc: "b".into() }
            ]
        );
    }
}
