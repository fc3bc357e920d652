//! Plan-view line-of-sight blocking by vehicle footprints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Axis-aligned vehicle footprint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleBody {
    /// Longitudinal extent, m.
    pub length: f64,
    /// Lateral extent, m.
    pub width: f64,
}

impl Default for VehicleBody {
    fn default() -> Self {
        Self {
            length: 4.45008,
            width: 1.8,
        }
    }
}

impl VehicleBody {
    pub fn new(length: f64, width: f64) -> Result<Self> {
        let body = Self { length, width };
        body.validate()?;
        Ok(body)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::invalid("vehicle_length", "must be positive"));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::invalid("vehicle_width", "must be positive"));
        }
        Ok(())
    }

    pub fn at(self, center: Vec2) -> Occluder {
        Occluder { center, body: self }
    }
}

/// A vehicle footprint placed in the world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occluder {
    pub center: Vec2,
    pub body: VehicleBody,
}

impl Occluder {
    pub fn min(&self) -> Vec2 {
        Vec2::new(
            self.center.x - 0.5 * self.body.length,
            self.center.y - 0.5 * self.body.width,
        )
    }

    pub fn max(&self) -> Vec2 {
        Vec2::new(
            self.center.x + 0.5 * self.body.length,
            self.center.y + 0.5 * self.body.width,
        )
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let (lo, hi) = (self.min(), self.max());
        (lo.x..=hi.x).contains(&p.x) && (lo.y..=hi.y).contains(&p.y)
    }
}

/// True when the segment from `sensor` to `target` touches the footprint, or
/// the target stands inside it.
pub fn los_occluded(sensor: Vec2, target: Vec2, occluder: &Occluder) -> bool {
    if occluder.contains(target) {
        return true;
    }
    let (lo, hi) = (occluder.min(), occluder.max());
    let d = target - sensor;
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    // Liang-Barsky clipping against the four slabs.
    for (p, q) in [
        (-d.x, sensor.x - lo.x),
        (d.x, hi.x - sensor.x),
        (-d.y, sensor.y - lo.y),
        (d.y, hi.y - sensor.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rect(cx: f64, cy: f64) -> Occluder {
        VehicleBody::new(4.45, 1.8).unwrap().at(Vec2::new(cx, cy))
    }

    #[test]
    fn collinear_blocking() {
        assert!(los_occluded(
            Vec2::ZERO,
            Vec2::new(20.0, 0.0),
            &rect(10.0, 0.0)
        ));
    }

    #[test]
    fn clear_diagonal() {
        assert!(!los_occluded(
            Vec2::ZERO,
            Vec2::new(20.0, 10.0),
            &rect(10.0, 0.0)
        ));
    }

    #[test]
    fn target_inside_footprint() {
        assert!(los_occluded(
            Vec2::new(-50.0, 30.0),
            Vec2::new(10.5, 0.2),
            &rect(10.0, 0.0)
        ));
    }

    #[test]
    fn segment_stops_short() {
        assert!(!los_occluded(
            Vec2::ZERO,
            Vec2::new(7.0, 0.0),
            &rect(10.0, 0.0)
        ));
        assert!(!los_occluded(
            Vec2::new(30.0, 0.0),
            Vec2::new(13.0, 0.0),
            &rect(10.0, 0.0)
        ));
    }

    #[test]
    fn axis_parallel_outside_slab() {
        assert!(!los_occluded(
            Vec2::new(0.0, 2.0),
            Vec2::new(20.0, 2.0),
            &rect(10.0, 0.0)
        ));
        assert!(los_occluded(
            Vec2::new(0.0, 0.9),
            Vec2::new(20.0, 0.9),
            &rect(10.0, 0.0)
        ));
    }

    #[test]
    fn rejects_bad_body() {
        assert!(VehicleBody::new(0.0, 1.8).is_err());
        assert!(VehicleBody::new(4.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_in_endpoints(
            ax in -30.0..30.0f64, ay in -10.0..10.0f64,
            bx in -30.0..30.0f64, by in -10.0..10.0f64,
            cx in -10.0..10.0f64, cy in -3.0..3.0f64,
        ) {
            let r = rect(cx, cy);
            let a = Vec2::new(ax, ay);
            let b = Vec2::new(bx, by);
            if !r.contains(a) && !r.contains(b) {
                prop_assert_eq!(los_occluded(a, b, &r), los_occluded(b, a, &r));
            }
        }

        #[test]
        fn separated_boxes_never_block(
            ax in -30.0..30.0f64, ay in -10.0..10.0f64,
            bx in -30.0..30.0f64, by in -10.0..10.0f64,
            gap in 0.01..20.0f64, side in 0usize..4,
        ) {
            let a = Vec2::new(ax, ay);
            let b = Vec2::new(bx, by);
            let (lo_x, hi_x) = (ax.min(bx), ax.max(bx));
            let (lo_y, hi_y) = (ay.min(by), ay.max(by));
            let half = Vec2::new(4.45 / 2.0, 0.9);
            let center = match side {
                0 => Vec2::new(hi_x + gap + half.x, ay),
                1 => Vec2::new(lo_x - gap - half.x, ay),
                2 => Vec2::new(ax, hi_y + gap + half.y),
                _ => Vec2::new(ax, lo_y - gap - half.y),
            };
            prop_assert!(!los_occluded(a, b, &VehicleBody::new(4.45, 1.8).unwrap().at(center)));
        }
    }
}
