//! Proportional collision-avoidance braking.
//!
//! Below the TTC threshold the commanded pressure grows linearly as the TTC
//! shrinks, reaching full pressure at zero. Above it (or with no valid TTC) the
//! vehicle keeps its speed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ttc::TtcOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrakePolicy {
    /// TTC threshold in seconds.
    pub tau_max: f64,
    /// Full-brake pressure, bar.
    pub p_max: f64,
    /// Deceleration at full pressure, m/s².
    pub d_max: f64,
}

impl Default for BrakePolicy {
    fn default() -> Self {
        Self {
            tau_max: 10.0,
            p_max: 200.0,
            d_max: 8.0,
        }
    }
}

impl BrakePolicy {
    pub fn new(tau_max: f64, p_max: f64, d_max: f64) -> Result<Self> {
        let policy = Self {
            tau_max,
            p_max,
            d_max,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_max", self.tau_max),
            ("p_max", self.p_max),
            ("d_max", self.d_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Commanded brake pressure in bar.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct BrakeCommand {
    pub pressure: f64,
}

impl BrakeCommand {
    pub const RELEASE: BrakeCommand = BrakeCommand { pressure: 0.0 };

    pub fn is_braking(self) -> bool {
        self.pressure > 0.0
    }
}

pub fn decide(ttc: TtcOutcome, policy: &BrakePolicy) -> BrakeCommand {
    match ttc {
        TtcOutcome::Collision(tau) if tau <= policy.tau_max => {
            let tau = tau.max(0.0);
            BrakeCommand {
                pressure: (policy.tau_max - tau) / policy.tau_max * policy.p_max,
            }
        }
        _ => BrakeCommand::RELEASE,
    }
}

/// Deceleration magnitude (m/s²) produced by a pressure command.
pub fn decel_of(cmd: BrakeCommand, policy: &BrakePolicy) -> f64 {
    let p = cmd.pressure.clamp(0.0, policy.p_max);
    p / policy.p_max * policy.d_max
}

/// Threshold that lets a vehicle at `bffs` stop at comfortable deceleration `a_b`.
pub fn derive_tau_max(bffs: f64, a_b: f64) -> Result<f64> {
    if bffs.is_nan() || bffs <= 0.0 {
        return Err(Error::Config(format!("bffs must be positive, got {bffs}")));
    }
    if a_b.is_nan() || a_b <= 0.0 {
        return Err(Error::Config(format!("a_b must be positive, got {a_b}")));
    }
    Ok(bffs / a_b)
}
