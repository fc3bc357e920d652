//! Single runs, the speed-by-strategy sweep, and CSV output.

use std::fmt::{self, Write as _};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::ttc::{TtcOutcome, NO_VALID_SENTINEL};

/// Slack when comparing accumulated simulation time with end times.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    WithV2v,
    WithoutV2v,
}

impl Strategy {
    pub const BOTH: [Strategy; 2] = [Strategy::WithV2v, Strategy::WithoutV2v];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::WithV2v => "with_v2v",
            Strategy::WithoutV2v => "without_v2v",
        }
    }

    pub fn v2v(self) -> bool {
        self == Strategy::WithV2v
    }

    pub fn of(v2v: bool) -> Self {
        if v2v {
            Strategy::WithV2v
        } else {
            Strategy::WithoutV2v
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Snapshot of one control tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub av_x: f64,
    pub av_speed: f64,
    pub ped_x: f64,
    pub ped_y: f64,
    pub ttc: TtcOutcome,
    pub pressure: f64,
    /// A pedestrian estimate was available this tick.
    pub detected: bool,
    pub occluded: bool,
}

impl StepRecord {
    pub fn ttc_serialized(&self) -> f64 {
        self.ttc.serialized()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub av_speed_mph: f64,
    pub strategy: Strategy,
    pub detected_time: Option<f64>,
    /// TTC at the detection tick; `None` if the pedestrian was never detected.
    pub first_ttc: Option<TtcOutcome>,
    pub min_ttc: TtcOutcome,
    pub collision: bool,
    pub collision_time: Option<f64>,
    pub max_pressure: f64,
}

/// Runs one scenario until contact, pedestrian clearance plus the tail, or
/// `t_end`. The tick on which contact is first seen is recorded with its
/// control response before the run stops.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<(SimResult, Vec<StepRecord>)> {
    let sc = cfg.resolve()?;
    let params = sc.params;
    params.validate()?;
    let mut world = sc.build_world()?;
    let r_sum = sc.r_sum();

    let mut trace = Vec::new();
    let mut first_ttc = None;
    let mut cleared_at: Option<f64> = None;

    loop {
        world.channel_step(&params);
        let decision = world.compute_control(&params);
        if decision.estimate.is_some() && first_ttc.is_none() {
            first_ttc = Some(decision.ttc);
        }
        trace.push(StepRecord {
            t: world.t,
            av_x: world.av.pos.x,
            av_speed: world.av.vel.x,
            ped_x: world.pedestrian.pos.x,
            ped_y: world.pedestrian.pos.y,
            ttc: decision.ttc,
            pressure: decision.cmd.pressure,
            detected: decision.estimate.is_some(),
            occluded: decision.occluded,
        });

        if world.collided || world.t >= sc.t_end - TIME_EPS {
            break;
        }
        if cleared_at.is_none()
            && world.ped_present()
            && world.pedestrian.pos.y - world.av.pos.y > r_sum
        {
            cleared_at = Some(world.t);
        }
        if let Some(c) = cleared_at {
            if world.t >= c + sc.tail - TIME_EPS {
                break;
            }
        }
        world.advance(&params, decision.cmd);
    }

    let min_ttc = trace
        .iter()
        .filter_map(|r| r.ttc.tau())
        .min_by(f64::total_cmp)
        .map_or(TtcOutcome::NoValid, TtcOutcome::Collision);
    let max_pressure = trace.iter().map(|r| r.pressure).fold(0.0, f64::max);

    let result = SimResult {
        av_speed_mph: cfg.av_speed_mph,
        strategy: Strategy::of(cfg.v2v),
        detected_time: world.detected_time,
        first_ttc,
        min_ttc,
        collision: world.collided,
        collision_time: world.collision_time,
        max_pressure,
    };
    Ok((result, trace))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub speeds: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub base: ScenarioConfig,
}

impl SweepSpec {
    pub fn new(base: ScenarioConfig) -> Self {
        Self {
            speeds: (0..13).map(|k| 10.0 + 5.0 * k as f64).collect(),
            strategies: Strategy::BOTH.to_vec(),
            base,
        }
    }

    pub fn with_speeds(mut self, speeds: Vec<f64>) -> Self {
        self.speeds = speeds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.speeds.is_empty() {
            return Err(Error::invalid("speeds", "at least one speed is required"));
        }
        if let Some(s) = self.speeds.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::invalid(
                "speeds",
                format!("speeds must be positive, got {s}"),
            ));
        }
        if self.strategies.is_empty() {
            return Err(Error::invalid(
                "strategies",
                "at least one strategy is required",
            ));
        }
        self.base.validate()
    }

    /// Configs in output order: by speed, then strategy.
    pub fn configs(&self) -> Vec<ScenarioConfig> {
        self.speeds
            .iter()
            .flat_map(|&s| {
                self.strategies
                    .iter()
                    .map(move |st| self.base.with_speed(s).with_v2v(st.v2v()))
            })
            .collect()
    }
}

/// Parses `start:end:step` (inclusive) or a comma-separated list of speeds.
pub fn parse_speeds(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid("speeds", format!("not a number: `{s}`")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, end, step] => {
            let (start, end, step) = (num(start)?, num(end)?, num(step)?);
            if step.is_nan() || step <= 0.0 || end < start {
                return Err(Error::invalid("speeds", format!("bad range `{text}`")));
            }
            let n = ((end - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| start + step * k as f64).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(Error::invalid(
            "speeds",
            format!("expected start:end:step, got `{text}`"),
        )),
    }
}

/// Independent runs in parallel; results come back in [`SweepSpec::configs`] order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SimResult>> {
    spec.validate()?;
    spec.configs()
        .par_iter()
        .map(|cfg| run_scenario(cfg).map(|(r, _)| r))
        .collect()
}

pub const RESULTS_HEADER: &str =
    "speed_mph,strategy,detected_time_s,first_ttc_s,min_ttc_s,collision,collision_time_s,max_pressure_bar";

pub const TRACE_HEADER: &str =
    "t_s,av_x_m,av_speed_mps,ped_x_m,ped_y_m,ttc_s,pressure_bar,detected,occluded";

fn ttc_cell(t: TtcOutcome) -> String {
    match t {
        TtcOutcome::NoValid => format!("{}", NO_VALID_SENTINEL as i64),
        TtcOutcome::Collision(tau) => format!("{tau:.4}"),
    }
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

pub fn write_csv(results: &[SimResult]) -> String {
    let mut out = String::with_capacity(64 * (results.len() + 1));
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:.4}",
            r.av_speed_mph,
            r.strategy,
            opt_cell(r.detected_time),
            ttc_cell(r.first_ttc.unwrap_or(TtcOutcome::NoValid)),
            ttc_cell(r.min_ttc),
            r.collision,
            opt_cell(r.collision_time),
            r.max_pressure,
        );
    }
    out
}

pub fn write_trace(trace: &[StepRecord]) -> String {
    let mut out = String::with_capacity(80 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in trace {
        let _ = writeln!(
            out,
            "{:.4},{:.4},{:.4},{:.4},{:.4},{},{:.4},{},{}",
            s.t,
            s.av_x,
            s.av_speed,
            s.ped_x,
            s.ped_y,
            ttc_cell(s.ttc),
            s.pressure,
            s.detected,
            s.occluded,
        );
    }
    out
}

pub fn save(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
