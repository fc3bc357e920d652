//! Scenario configuration, pedestrian-entry calibration and world assembly.
//!
//! Config files are flat TOML with unit-suffixed keys. Values stay in file
//! units inside [`ScenarioConfig`]; [`ScenarioConfig::resolve`] validates them
//! and produces an SI [`Scenario`].

use serde::{Deserialize, Serialize};

use crate::brake::BrakePolicy;
use crate::error::{Error, Result};
use crate::geometry::{ft, mph, to_si, ActorState, Unit, Vec2};
use crate::world::{
    ChannelModel, PedestrianScript, SensorModel, TransmitterScript, VehicleBody, WorldParams,
    WorldState,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub av_speed_mph: f64,
    pub v2v: bool,
    /// Disable to check that the calibrated conflict is real.
    pub braking: bool,

    pub lane_width_ft: f64,
    pub num_lanes: u32,
    pub av_lane: u32,
    pub transmitter_lane: u32,
    pub av_radius_ft: f64,
    pub ped_radius_ft: f64,
    pub vehicle_width_m: f64,

    pub ped_speed_ftps: f64,
    /// Lateral position where the pedestrian enters, from the outside road
    /// edge. Defaults to the outside edge of the transmitter footprint, where
    /// the pedestrian is first hidden from the subject vehicle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ped_start_y_ft: Option<f64>,
    /// Whether the pedestrian stands at its entry point before walking.
    pub ped_waits: bool,

    /// Initial subject-vehicle gap to the crossing line, as seconds of travel.
    pub approach_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub av_gap_m: Option<f64>,

    /// Transmitter front-bumper clearance to the crossing line when stopped.
    pub standoff_m: f64,
    pub comfort_decel_ftps2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transmitter_speed_mph: Option<f64>,
    /// Initial transmitter distance to its stop point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transmitter_gap_m: Option<f64>,

    pub tau_max_s: f64,
    pub p_max_bar: f64,
    pub d_max_mps2: f64,

    pub sensor_range_m: f64,
    pub sensor_fov_half_deg: f64,
    pub transmitter_sensor_range_m: f64,
    pub transmitter_fov_half_deg: f64,

    pub latency_s: f64,
    pub drop_prob: f64,
    pub v2v_range_m: f64,
    pub broadcast_period_s: f64,
    pub seed: u64,

    pub dt_s: f64,
    pub t_end_s: f64,
    /// Time simulated after the pedestrian has cleared the subject lane.
    pub tail_s: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            av_speed_mph: 45.0,
            v2v: true,
            braking: true,
            lane_width_ft: 12.0,
            num_lanes: 4,
            av_lane: 1,
            transmitter_lane: 0,
            av_radius_ft: 7.3,
            ped_radius_ft: 5.0,
            vehicle_width_m: 1.8,
            ped_speed_ftps: 4.0,
            ped_start_y_ft: None,
            ped_waits: false,
            approach_time_s: 20.0,
            av_gap_m: None,
            standoff_m: 2.0,
            comfort_decel_ftps2: 11.2,
            transmitter_speed_mph: None,
            transmitter_gap_m: None,
            tau_max_s: 10.0,
            p_max_bar: 200.0,
            d_max_mps2: 8.0,
            sensor_range_m: 150.0,
            sensor_fov_half_deg: 45.0,
            transmitter_sensor_range_m: 150.0,
            transmitter_fov_half_deg: 180.0,
            latency_s: 0.0,
            drop_prob: 0.0,
            v2v_range_m: 300.0,
            broadcast_period_s: 0.02,
            seed: 0,
            dt_s: 0.02,
            t_end_s: 60.0,
            tail_s: 5.0,
        }
    }
}

/// Parses and validates config text. Unknown keys are rejected.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &ScenarioConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive, got {v}")))
    }
}

fn nonnegative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("must be nonnegative, got {v}"),
        ))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("av_speed_mph", self.av_speed_mph),
            ("lane_width_ft", self.lane_width_ft),
            ("av_radius_ft", self.av_radius_ft),
            ("ped_radius_ft", self.ped_radius_ft),
            ("vehicle_width_m", self.vehicle_width_m),
            ("ped_speed_ftps", self.ped_speed_ftps),
            ("approach_time_s", self.approach_time_s),
            ("comfort_decel_ftps2", self.comfort_decel_ftps2),
            ("tau_max_s", self.tau_max_s),
            ("p_max_bar", self.p_max_bar),
            ("d_max_mps2", self.d_max_mps2),
            ("sensor_range_m", self.sensor_range_m),
            (
                "transmitter_sensor_range_m",
                self.transmitter_sensor_range_m,
            ),
            ("v2v_range_m", self.v2v_range_m),
            ("broadcast_period_s", self.broadcast_period_s),
            ("dt_s", self.dt_s),
            ("t_end_s", self.t_end_s),
        ] {
            positive(field, v)?;
        }
        for (field, v) in [
            ("standoff_m", self.standoff_m),
            ("latency_s", self.latency_s),
            ("tail_s", self.tail_s),
        ] {
            nonnegative(field, v)?;
        }
        if self.ped_start_y_ft.is_some_and(|y| !y.is_finite()) {
            return Err(Error::invalid("ped_start_y_ft", "must be finite"));
        }
        if let Some(g) = self.av_gap_m {
            positive("av_gap_m", g)?;
        }
        if let Some(v) = self.transmitter_speed_mph {
            nonnegative("transmitter_speed_mph", v)?;
        }
        if let Some(g) = self.transmitter_gap_m {
            nonnegative("transmitter_gap_m", g)?;
        }
        if !(0.0..=1.0).contains(&self.drop_prob) {
            return Err(Error::invalid(
                "drop_prob",
                format!("must lie in [0, 1], got {}", self.drop_prob),
            ));
        }
        for (field, v) in [
            ("sensor_fov_half_deg", self.sensor_fov_half_deg),
            ("transmitter_fov_half_deg", self.transmitter_fov_half_deg),
        ] {
            if !(v > 0.0 && v <= 180.0) {
                return Err(Error::invalid(
                    field,
                    format!("must lie in (0, 180], got {v}"),
                ));
            }
        }
        if self.num_lanes < 2 {
            return Err(Error::invalid("num_lanes", "need at least two lanes"));
        }
        for (field, lane) in [
            ("av_lane", self.av_lane),
            ("transmitter_lane", self.transmitter_lane),
        ] {
            if lane >= self.num_lanes {
                return Err(Error::invalid(
                    field,
                    format!("lane {lane} outside 0..{}", self.num_lanes),
                ));
            }
        }
        if self.av_lane == self.transmitter_lane {
            return Err(Error::invalid(
                "transmitter_lane",
                "must differ from av_lane",
            ));
        }
        Ok(())
    }

    /// Validated SI view with the pedestrian entry time calibrated.
    pub fn resolve(&self) -> Result<Scenario> {
        self.validate()?;
        let av_speed = mph(self.av_speed_mph);
        let lane_width = ft(self.lane_width_ft);
        let av_radius = ft(self.av_radius_ft);
        let ped_radius = ft(self.ped_radius_ft);
        let body = VehicleBody::new(2.0 * av_radius, self.vehicle_width_m)?;
        let av_gap = self.av_gap_m.unwrap_or(av_speed * self.approach_time_s);
        let comfort_decel = to_si(self.comfort_decel_ftps2, Unit::FtPerS2);
        let transmitter_speed = self.transmitter_speed_mph.map_or(av_speed, mph);
        let transmitter_gap = self
            .transmitter_gap_m
            .unwrap_or(transmitter_speed * transmitter_speed / comfort_decel);

        let transmitter_y = lane_center(self.transmitter_lane, lane_width);
        let ped_start_y = self
            .ped_start_y_ft
            .map_or(transmitter_y - 0.5 * body.width, ft);

        let mut sc = Scenario {
            av_speed,
            av_start_x: 0.0,
            av_y: lane_center(self.av_lane, lane_width),
            transmitter_y,
            lane_width,
            av_radius,
            ped_radius,
            body,
            cross_x: av_gap,
            ped_speed: to_si(self.ped_speed_ftps, Unit::FtPerS),
            ped_start_y,
            ped_waits: self.ped_waits,
            ped_t_start: 0.0,
            transmitter_speed,
            transmitter_stop_x: av_gap - self.standoff_m - 0.5 * body.length,
            transmitter_gap,
            comfort_decel,
            params: WorldParams {
                dt: self.dt_s,
                policy: BrakePolicy::new(self.tau_max_s, self.p_max_bar, self.d_max_mps2)?,
                braking: self.braking,
                v2v_enabled: self.v2v,
                av_sensor: SensorModel::new(
                    self.sensor_range_m,
                    self.sensor_fov_half_deg.to_radians(),
                )?,
                transmitter_sensor: SensorModel::new(
                    self.transmitter_sensor_range_m,
                    self.transmitter_fov_half_deg.to_radians(),
                )?,
                body,
            },
            channel: ChannelModel {
                latency: self.latency_s,
                drop_prob: self.drop_prob,
                range: self.v2v_range_m,
                period: self.broadcast_period_s,
                seed: self.seed,
            },
            t_end: self.t_end_s,
            tail: self.tail_s,
        };
        sc.ped_t_start = sc.calibrated_start()?;
        Ok(sc)
    }

    pub fn with_speed(&self, av_speed_mph: f64) -> Self {
        Self {
            av_speed_mph,
            ..self.clone()
        }
    }

    pub fn with_v2v(&self, v2v: bool) -> Self {
        Self {
            v2v,
            ..self.clone()
        }
    }
}

/// Lateral centre of lane `index`, counting from the outside edge.
pub fn lane_center(index: u32, lane_width: f64) -> f64 {
    (index as f64 + 0.5) * lane_width
}

/// Pedestrian walk-start time (s) for a centre-on-centre conflict.
pub fn calibrate_entry(cfg: &ScenarioConfig) -> Result<f64> {
    Ok(cfg.resolve()?.ped_t_start)
}

/// Fully resolved scenario in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub av_speed: f64,
    pub av_start_x: f64,
    pub av_y: f64,
    pub transmitter_y: f64,
    pub lane_width: f64,
    pub av_radius: f64,
    pub ped_radius: f64,
    pub body: VehicleBody,
    /// Longitudinal position of the crossing line.
    pub cross_x: f64,
    pub ped_speed: f64,
    pub ped_start_y: f64,
    pub ped_waits: bool,
    pub ped_t_start: f64,
    pub transmitter_speed: f64,
    /// Transmitter centre position when halted.
    pub transmitter_stop_x: f64,
    pub transmitter_gap: f64,
    pub comfort_decel: f64,
    pub params: WorldParams,
    pub channel: ChannelModel,
    pub t_end: f64,
    pub tail: f64,
}

impl Scenario {
    pub fn r_sum(&self) -> f64 {
        self.av_radius + self.ped_radius
    }

    /// Time for the unbraked subject vehicle centre to reach the crossing line.
    pub fn arrival_time(&self) -> f64 {
        (self.cross_x - self.av_start_x) / self.av_speed
    }

    fn calibrated_start(&self) -> Result<f64> {
        let walk = self.av_y - self.ped_start_y;
        if walk <= 0.0 {
            return Err(Error::Calibration(format!(
                "pedestrian starts at y = {:.3} m, not outside the subject lane centre {:.3} m",
                self.ped_start_y, self.av_y
            )));
        }
        let t_start = self.arrival_time() - walk / self.ped_speed;
        if t_start < 0.0 {
            return Err(Error::Calibration(format!(
                "pedestrian needs {:.3} s to reach the subject lane but the vehicle arrives in {:.3} s",
                walk / self.ped_speed,
                self.arrival_time()
            )));
        }
        Ok(t_start)
    }

    pub fn build_world(&self) -> Result<WorldState> {
        let av = ActorState::new(
            Vec2::new(self.av_start_x, self.av_y),
            Vec2::new(self.av_speed, 0.0),
            self.av_radius,
        )?;
        let transmitter = ActorState::new(
            Vec2::new(
                self.transmitter_stop_x - self.transmitter_gap,
                self.transmitter_y,
            ),
            Vec2::new(self.transmitter_speed, 0.0),
            self.av_radius,
        )?;
        let ped = PedestrianScript {
            origin: Vec2::new(self.cross_x, self.ped_start_y),
            walk_vel: Vec2::new(0.0, self.ped_speed),
            t_start: self.ped_t_start,
            present_before_start: self.ped_waits,
        };
        WorldState::new(
            av,
            transmitter,
            ped,
            self.ped_radius,
            TransmitterScript {
                stop_x: self.transmitter_stop_x,
                comfort_decel: self.comfort_decel,
            },
            self.channel,
        )
    }
}
