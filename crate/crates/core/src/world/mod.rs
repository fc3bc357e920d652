//! The discrete-time world: subject vehicle, transmitter vehicle and a
//! crossing pedestrian.
//!
//! Each tick the transmitter senses and broadcasts, the subject vehicle picks
//! a pedestrian estimate and a brake command, both vehicles move, the
//! pedestrian walks, and contact is checked.

pub mod channel;
pub mod occlusion;
pub mod sensor;

use serde::{Deserialize, Serialize};

use crate::brake::{decel_of, decide, BrakeCommand, BrakePolicy};
use crate::error::{Error, Result};
use crate::geometry::{ActorState, Vec2};
use crate::ttc::{ttc, TtcOutcome};

pub use channel::{Channel, ChannelModel, V2VMessage};
pub use occlusion::{los_occluded, Occluder, VehicleBody};
pub use sensor::{sense, Mount, Observation, SensorModel};

/// Pedestrian motion: idle at `origin` until `t_start`, then constant velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PedestrianScript {
    pub origin: Vec2,
    pub walk_vel: Vec2,
    pub t_start: f64,
    /// Whether the pedestrian is in the scene before it starts walking.
    pub present_before_start: bool,
}

impl PedestrianScript {
    pub fn present(&self, t: f64) -> bool {
        self.present_before_start || t >= self.t_start
    }

    pub fn position(&self, t: f64) -> Vec2 {
        self.origin + self.walk_vel * (t - self.t_start).max(0.0)
    }

    pub fn velocity(&self, t: f64) -> Vec2 {
        if t >= self.t_start {
            self.walk_vel
        } else {
            Vec2::ZERO
        }
    }
}

/// Transmitter longitudinal law: cruise, then brake so that its centre halts
/// at `stop_x` once the required rate reaches `comfort_decel`; then hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmitterScript {
    pub stop_x: f64,
    pub comfort_decel: f64,
}

impl TransmitterScript {
    /// Deceleration to apply over a tick of `dt` given position and speed
    /// along +x. The stopping distance accounts for the semi-implicit update.
    pub fn decel(&self, x: f64, speed: f64, dt: f64) -> f64 {
        let remaining = self.stop_x - x;
        if speed <= 0.0 {
            return 0.0;
        }
        if remaining <= 0.0 {
            return f64::INFINITY;
        }
        let required = speed * speed / (2.0 * (remaining + 0.5 * speed * dt));
        if required >= self.comfort_decel {
            required
        } else {
            0.0
        }
    }
}

/// Provenance of the pedestrian estimate used for a control decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfoSource {
    OwnSensor,
    V2V,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PedInfo {
    pub source: InfoSource,
    pub stamp: f64,
    pub pos: Vec2,
    pub vel: Vec2,
}

/// Fixed parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldParams {
    pub dt: f64,
    pub policy: BrakePolicy,
    /// When false the subject vehicle never brakes (calibration check).
    pub braking: bool,
    pub v2v_enabled: bool,
    pub av_sensor: SensorModel,
    pub transmitter_sensor: SensorModel,
    pub body: VehicleBody,
}

impl WorldParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        self.policy.validate()?;
        self.av_sensor.validate()?;
        self.transmitter_sensor.validate()?;
        self.body.validate()
    }
}

/// What the subject vehicle saw and decided on one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub t: f64,
    pub ttc: TtcOutcome,
    pub cmd: BrakeCommand,
    pub estimate: Option<PedInfo>,
    /// Pedestrian present but hidden from the onboard sensor by the transmitter.
    pub occluded: bool,
}

#[derive(Debug, Clone)]
pub struct WorldState {
    pub t: f64,
    tick: u64,
    pub av: ActorState,
    pub transmitter: ActorState,
    pub pedestrian: ActorState,
    pub ped_script: PedestrianScript,
    pub transmitter_script: TransmitterScript,
    pub channel: Channel,
    pub latest_ped_info: Option<PedInfo>,
    pub detected_time: Option<f64>,
    pub collided: bool,
    pub collision_time: Option<f64>,
    pub last_ttc: TtcOutcome,
    pub last_cmd: BrakeCommand,
}

impl WorldState {
    pub fn new(
        av: ActorState,
        transmitter: ActorState,
        ped_script: PedestrianScript,
        ped_radius: f64,
        transmitter_script: TransmitterScript,
        channel: ChannelModel,
    ) -> Result<Self> {
        av.validate()?;
        transmitter.validate()?;
        let pedestrian = ActorState::new(
            ped_script.position(0.0),
            ped_script.velocity(0.0),
            ped_radius,
        )?;
        Ok(Self {
            t: 0.0,
            tick: 0,
            av,
            transmitter,
            pedestrian,
            ped_script,
            transmitter_script,
            channel: Channel::new(channel)?,
            latest_ped_info: None,
            detected_time: None,
            collided: false,
            collision_time: None,
            last_ttc: TtcOutcome::NoValid,
            last_cmd: BrakeCommand::RELEASE,
        })
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn ped_present(&self) -> bool {
        self.ped_script.present(self.t)
    }

    pub fn transmitter_occluder(&self, body: &VehicleBody) -> Occluder {
        body.at(self.transmitter.pos)
    }

    fn av_mount(&self) -> Mount {
        Mount::front_of(&self.av, self.av.radius)
    }

    fn transmitter_mount(&self, body: &VehicleBody) -> Mount {
        Mount::front_of(&self.transmitter, 0.5 * body.length)
    }

    /// Transmitter detection and broadcast for the current tick.
    pub fn channel_step(&mut self, params: &WorldParams) {
        let detection = if self.ped_present() {
            sense(
                &self.transmitter_mount(&params.body),
                &params.transmitter_sensor,
                &self.pedestrian,
                &[],
            )
        } else {
            None
        };
        if let Some(msg) = self
            .channel
            .step(self.t, detection, self.transmitter.pos, self.av.pos)
        {
            self.latest_ped_info = Some(PedInfo {
                source: InfoSource::V2V,
                stamp: msg.sent_at,
                pos: msg.ped_pos,
                vel: msg.ped_vel,
            });
        }
    }

    /// Onboard observation of the pedestrian, and whether the transmitter
    /// body is what hides it.
    pub fn own_observation(&self, params: &WorldParams) -> (Option<Observation>, bool) {
        if !self.ped_present() {
            return (None, false);
        }
        let mount = self.av_mount();
        let occluder = self.transmitter_occluder(&params.body);
        let obs = sense(&mount, &params.av_sensor, &self.pedestrian, &[occluder]);
        let occluded = obs.is_none()
            && sensor::in_field_of_view(&mount, &params.av_sensor, self.pedestrian.pos)
            && los_occluded(mount.pos, self.pedestrian.pos, &occluder);
        (obs, occluded)
    }

    pub fn compute_control(&mut self, params: &WorldParams) -> Decision {
        let (own, occluded) = self.own_observation(params);
        let estimate = match own {
            Some(o) => Some(PedInfo {
                source: InfoSource::OwnSensor,
                stamp: self.t,
                pos: o.pos,
                vel: o.vel,
            }),
            None if params.v2v_enabled => self.latest_ped_info.map(|info| PedInfo {
                pos: info.pos + info.vel * (self.t - info.stamp).max(0.0),
                ..info
            }),
            None => None,
        };

        let (tau, cmd) = match estimate {
            Some(info) => {
                if self.detected_time.is_none() {
                    self.detected_time = Some(self.t);
                }
                let ped = ActorState {
                    pos: info.pos,
                    vel: info.vel,
                    radius: self.pedestrian.radius,
                };
                let tau = ttc(&ped, &self.av);
                let cmd = if params.braking {
                    decide(tau, &params.policy)
                } else {
                    BrakeCommand::RELEASE
                };
                (tau, cmd)
            }
            None => (TtcOutcome::NoValid, BrakeCommand::RELEASE),
        };
        self.last_ttc = tau;
        self.last_cmd = cmd;
        Decision {
            t: self.t,
            ttc: tau,
            cmd,
            estimate,
            occluded,
        }
    }

    /// Phases 3 to 7: brake, move, walk, check contact, advance the clock.
    pub fn advance(&mut self, params: &WorldParams, cmd: BrakeCommand) {
        let dt = params.dt;

        let speed = (self.av.vel.x - decel_of(cmd, &params.policy) * dt).max(0.0);
        self.av.vel = Vec2::new(speed, 0.0);

        let tx_before = self.transmitter.pos.x;
        let tx_decel = self
            .transmitter_script
            .decel(tx_before, self.transmitter.vel.x, dt);
        let tx_speed = (self.transmitter.vel.x - tx_decel * dt).max(0.0);
        self.transmitter.vel = Vec2::new(tx_speed, 0.0);

        self.av.pos += self.av.vel * dt;
        self.transmitter.pos += self.transmitter.vel * dt;
        let stop_x = self.transmitter_script.stop_x;
        if tx_before < stop_x && self.transmitter.pos.x >= stop_x {
            self.transmitter.pos.x = stop_x;
            self.transmitter.vel = Vec2::ZERO;
        }

        self.tick += 1;
        let t_next = self.tick as f64 * dt;
        self.pedestrian.pos = self.ped_script.position(t_next);
        self.pedestrian.vel = self.ped_script.velocity(t_next);

        if !self.collided
            && self.ped_script.present(t_next)
            && (self.pedestrian.pos - self.av.pos).norm() <= self.pedestrian.radius + self.av.radius
        {
            self.collided = true;
            self.collision_time = Some(t_next);
        }
        self.t = t_next;
    }

    /// One full tick.
    pub fn step(&mut self, params: &WorldParams) -> Result<Decision> {
        params.validate()?;
        self.channel_step(params);
        let decision = self.compute_control(params);
        self.advance(params, decision.cmd);
        Ok(decision)
    }
}
