//! Idealised onboard perception: range, forward field of view and occlusion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ActorState, Vec2};
use crate::world::occlusion::{los_occluded, Occluder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    /// Detection range, m (exclusive).
    pub range: f64,
    /// Half-width of the forward field of view, rad.
    pub fov_half_angle: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            range: 150.0,
            fov_half_angle: std::f64::consts::FRAC_PI_4,
        }
    }
}

impl SensorModel {
    pub fn new(range: f64, fov_half_angle: f64) -> Result<Self> {
        let model = Self {
            range,
            fov_half_angle,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.range.is_nan() || self.range <= 0.0 {
            return Err(Error::invalid("sensor_range", "must be positive"));
        }
        if !(self.fov_half_angle > 0.0 && self.fov_half_angle <= std::f64::consts::PI) {
            return Err(Error::invalid(
                "sensor_fov",
                "half angle must lie in (0, pi]",
            ));
        }
        Ok(())
    }
}

/// Ground-truth kinematics of a sensed target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub pos: Vec2,
    pub vel: Vec2,
}

/// A sensor placed on a vehicle, looking along `heading` (unit vector).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mount {
    pub pos: Vec2,
    pub heading: Vec2,
}

impl Mount {
    /// Front-centre mount of a vehicle travelling along +x.
    pub fn front_of(vehicle: &ActorState, half_length: f64) -> Self {
        Self {
            pos: vehicle.pos + Vec2::new(half_length, 0.0),
            heading: Vec2::new(1.0, 0.0),
        }
    }
}

pub fn in_field_of_view(mount: &Mount, model: &SensorModel, target: Vec2) -> bool {
    let rel = target - mount.pos;
    let dist = rel.norm();
    if dist.is_nan() || dist >= model.range {
        return false;
    }
    if dist == 0.0 {
        return true;
    }
    let cos = (rel.dot(mount.heading) / dist).clamp(-1.0, 1.0);
    cos.acos() <= model.fov_half_angle
}

pub fn sense(
    mount: &Mount,
    model: &SensorModel,
    target: &ActorState,
    occluders: &[Occluder],
) -> Option<Observation> {
    if !in_field_of_view(mount, model, target.pos) {
        return None;
    }
    if occluders
        .iter()
        .any(|o| los_occluded(mount.pos, target.pos, o))
    {
        return None;
    }
    Some(Observation {
        pos: target.pos,
        vel: target.vel,
    })
}
