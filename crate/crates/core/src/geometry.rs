//! Planar vectors, actor states and unit conversion.
//!
//! The world is a 2D plan view: `x` runs along the roadway in the direction of
//! travel and `y` is lateral, growing from the outside (right) road edge
//! towards the inside lanes. Everything internal is SI.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Position, velocity and bounding-circle radius of one road user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActorState {
    pub pos: Vec2,
    pub vel: Vec2,
    pub radius: f64,
}

impl ActorState {
    pub fn new(pos: Vec2, vel: Vec2, radius: f64) -> Result<Self> {
        let state = Self { pos, vel, radius };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.pos.is_finite() || !self.vel.is_finite() {
            return Err(Error::invalid(
                "actor",
                "position and velocity must be finite",
            ));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(
                "actor.radius",
                "must be positive and finite",
            ));
        }
        Ok(())
    }

    pub fn speed(&self) -> f64 {
        self.vel.norm()
    }
}

/// Pedestrian state expressed relative to the vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeState {
    /// Pedestrian position minus vehicle position.
    pub x_rel: Vec2,
    /// Pedestrian velocity minus vehicle velocity.
    pub v_rel: Vec2,
    /// Sum of both bounding radii; touching distance.
    pub r_sum: f64,
}

pub fn relative_state(ped: &ActorState, av: &ActorState) -> RelativeState {
    RelativeState {
        x_rel: ped.pos - av.pos,
        v_rel: ped.vel - av.vel,
        r_sum: ped.radius + av.radius,
    }
}

/// Non-SI units that appear in config files and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Mph,
    Ft,
    FtPerS,
    FtPerS2,
}

const FOOT: f64 = 0.3048;
const MILE_PER_HOUR: f64 = 0.44704;

impl Unit {
    fn factor(self) -> f64 {
        match self {
            Unit::Mph => MILE_PER_HOUR,
            Unit::Ft | Unit::FtPerS | Unit::FtPerS2 => FOOT,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Unit::Mph => "mph",
            Unit::Ft => "ft",
            Unit::FtPerS => "ft_per_s",
            Unit::FtPerS2 => "ft_per_s2",
        }
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mph" => Ok(Unit::Mph),
            "ft" => Ok(Unit::Ft),
            "ft_per_s" | "ftps" => Ok(Unit::FtPerS),
            "ft_per_s2" | "ftps2" => Ok(Unit::FtPerS2),
            other => Err(Error::Config(format!("unknown unit tag `{other}`"))),
        }
    }
}

pub fn to_si(value: f64, unit: Unit) -> f64 {
    value * unit.factor()
}

pub fn from_si(value: f64, unit: Unit) -> f64 {
    value / unit.factor()
}

/// Converts using a textual unit tag, as found in config keys.
pub fn to_si_tagged(value: f64, tag: &str) -> Result<f64> {
    Ok(to_si(value, tag.parse()?))
}

pub fn mph(v: f64) -> f64 {
    to_si(v, Unit::Mph)
}

pub fn ft(v: f64) -> f64 {
    to_si(v, Unit::Ft)
}
