//! Python bindings for the occluded-pedestrian braking simulator.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use occlusion_sim::harness::{self, SimResult, StepRecord};
use occlusion_sim::scenario::{self, ScenarioConfig};
use occlusion_sim::world::VehicleBody;
use occlusion_sim::{
    brake, geometry, ttc as risk, ActorState, BrakeCommand, BrakePolicy, Error, TtcOutcome, Vec2,
};

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        1 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn v(p: (f64, f64)) -> Vec2 {
    Vec2::new(p.0, p.1)
}

fn outcome(t: Option<f64>) -> PyResult<TtcOutcome> {
    match t {
        None => Ok(TtcOutcome::NoValid),
        Some(tau) if tau >= 0.0 && tau.is_finite() => Ok(TtcOutcome::Collision(tau)),
        Some(tau) => Err(PyValueError::new_err(format!(
            "tau must be finite and >= 0, got {tau}"
        ))),
    }
}

/// Convert a value in `mph`, `ft`, `ft_per_s` or `ft_per_s2` to SI.
#[pyfunction]
fn to_si(value: f64, unit: &str) -> PyResult<f64> {
    geometry::to_si_tagged(value, unit).map_err(to_py)
}

/// Quadratic coefficients `(a, b, c, d)` for a relative state.
#[pyfunction]
fn quadratic_coeffs(x_rel: (f64, f64), v_rel: (f64, f64), r_sum: f64) -> (f64, f64, f64, f64) {
    let q = risk::quadratic_coeffs(&geometry::RelativeState {
        x_rel: v(x_rel),
        v_rel: v(v_rel),
        r_sum,
    });
    (q.a, q.b, q.c, q.d)
}

/// Time-to-collision in seconds, or `None` when there is no collision course.
#[pyfunction]
#[pyo3(signature = (ped_pos, ped_vel, ped_radius, av_pos, av_vel, av_radius))]
fn ttc(
    ped_pos: (f64, f64),
    ped_vel: (f64, f64),
    ped_radius: f64,
    av_pos: (f64, f64),
    av_vel: (f64, f64),
    av_radius: f64,
) -> PyResult<Option<f64>> {
    let ped = ActorState::new(v(ped_pos), v(ped_vel), ped_radius).map_err(to_py)?;
    let av = ActorState::new(v(av_pos), v(av_vel), av_radius).map_err(to_py)?;
    Ok(risk::ttc(&ped, &av).tau())
}

/// Brake pressure (bar) commanded for a TTC; `None` means no valid TTC.
#[pyfunction]
#[pyo3(signature = (tau, tau_max = 10.0, p_max = 200.0, d_max = 8.0))]
fn decide(tau: Option<f64>, tau_max: f64, p_max: f64, d_max: f64) -> PyResult<f64> {
    let policy = BrakePolicy::new(tau_max, p_max, d_max).map_err(to_py)?;
    Ok(brake::decide(outcome(tau)?, &policy).pressure)
}

/// Deceleration (m/s^2) produced by a brake pressure.
#[pyfunction]
#[pyo3(signature = (pressure, p_max = 200.0, d_max = 8.0))]
fn decel_of(pressure: f64, p_max: f64, d_max: f64) -> PyResult<f64> {
    let policy = BrakePolicy::new(10.0, p_max, d_max).map_err(to_py)?;
    Ok(brake::decel_of(BrakeCommand { pressure }, &policy))
}

#[pyfunction]
fn derive_tau_max(bffs: f64, a_b: f64) -> PyResult<f64> {
    brake::derive_tau_max(bffs, a_b).map_err(to_py)
}

/// Whether a vehicle footprint centred at `center` blocks the sight line.
#[pyfunction]
#[pyo3(signature = (sensor, target, center, length = 4.45008, width = 1.8))]
fn los_occluded(
    sensor: (f64, f64),
    target: (f64, f64),
    center: (f64, f64),
    length: f64,
    width: f64,
) -> PyResult<bool> {
    let body = VehicleBody::new(length, width).map_err(to_py)?;
    Ok(occlusion_sim::world::los_occluded(
        v(sensor),
        v(target),
        &body.at(v(center)),
    ))
}

/// Scenario configuration; see the repository README for keys.
#[pyclass(name = "ScenarioConfig", module = "pyocclusion", skip_from_py_object)]
#[derive(Clone)]
struct PyScenarioConfig {
    inner: ScenarioConfig,
}

#[pymethods]
impl PyScenarioConfig {
    #[new]
    #[pyo3(signature = (text = ""))]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: scenario::load_config(text).map_err(to_py)?,
        })
    }

    fn to_toml(&self) -> PyResult<String> {
        scenario::serialize_config(&self.inner).map_err(to_py)
    }

    #[getter]
    fn av_speed_mph(&self) -> f64 {
        self.inner.av_speed_mph
    }

    #[setter]
    fn set_av_speed_mph(&mut self, value: f64) -> PyResult<()> {
        let next = self.inner.with_speed(value);
        next.validate().map_err(to_py)?;
        self.inner = next;
        Ok(())
    }

    #[getter]
    fn v2v(&self) -> bool {
        self.inner.v2v
    }

    #[setter]
    fn set_v2v(&mut self, value: bool) {
        self.inner.v2v = value;
    }

    #[getter]
    fn braking(&self) -> bool {
        self.inner.braking
    }

    #[setter]
    fn set_braking(&mut self, value: bool) {
        self.inner.braking = value;
    }

    /// Calibrated pedestrian walk-start time, s.
    fn calibrate_entry(&self) -> PyResult<f64> {
        scenario::calibrate_entry(&self.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "ScenarioConfig(av_speed_mph={}, v2v={}, braking={})",
            self.inner.av_speed_mph, self.inner.v2v, self.inner.braking
        )
    }
}

#[pyclass(name = "SimResult", module = "pyocclusion", frozen)]
struct PySimResult {
    inner: SimResult,
}

#[pymethods]
impl PySimResult {
    #[getter]
    fn av_speed_mph(&self) -> f64 {
        self.inner.av_speed_mph
    }

    #[getter]
    fn strategy(&self) -> &'static str {
        self.inner.strategy.as_str()
    }

    #[getter]
    fn detected_time(&self) -> Option<f64> {
        self.inner.detected_time
    }

    /// TTC at detection; `None` when never detected or no valid TTC.
    #[getter]
    fn first_ttc(&self) -> Option<f64> {
        self.inner.first_ttc.and_then(TtcOutcome::tau)
    }

    #[getter]
    fn min_ttc(&self) -> Option<f64> {
        self.inner.min_ttc.tau()
    }

    #[getter]
    fn collision(&self) -> bool {
        self.inner.collision
    }

    #[getter]
    fn collision_time(&self) -> Option<f64> {
        self.inner.collision_time
    }

    #[getter]
    fn max_pressure(&self) -> f64 {
        self.inner.max_pressure
    }

    fn __repr__(&self) -> String {
        format!(
            "SimResult(av_speed_mph={}, strategy={}, collision={}, max_pressure={:.2})",
            self.inner.av_speed_mph,
            self.inner.strategy,
            self.inner.collision,
            self.inner.max_pressure
        )
    }
}

type TraceRow = (f64, f64, f64, f64, f64, f64, f64, bool, bool);

fn row(s: &StepRecord) -> TraceRow {
    (
        s.t,
        s.av_x,
        s.av_speed,
        s.ped_x,
        s.ped_y,
        s.ttc_serialized(),
        s.pressure,
        s.detected,
        s.occluded,
    )
}

/// Runs one scenario; returns the result and the per-step trace as tuples of
/// `(t, av_x, av_speed, ped_x, ped_y, ttc, pressure, detected, occluded)`.
#[pyfunction]
fn run_scenario(
    py: Python<'_>,
    config: PyRef<'_, PyScenarioConfig>,
) -> PyResult<(PySimResult, Vec<TraceRow>)> {
    let cfg = config.inner.clone();
    let (result, trace) = py.detach(|| harness::run_scenario(&cfg)).map_err(to_py)?;
    Ok((
        PySimResult { inner: result },
        trace.iter().map(row).collect(),
    ))
}

/// Runs every speed with and without V2V, ordered by speed then strategy.
#[pyfunction]
#[pyo3(signature = (config, speeds = None))]
fn sweep(
    py: Python<'_>,
    config: PyRef<'_, PyScenarioConfig>,
    speeds: Option<Vec<f64>>,
) -> PyResult<Vec<PySimResult>> {
    let mut spec = harness::SweepSpec::new(config.inner.clone());
    if let Some(s) = speeds {
        spec = spec.with_speeds(s);
    }
    let results = py.detach(|| harness::sweep(&spec)).map_err(to_py)?;
    Ok(results
        .into_iter()
        .map(|inner| PySimResult { inner })
        .collect())
}

#[pyfunction]
fn write_csv(results: Vec<PyRef<'_, PySimResult>>) -> String {
    let rows: Vec<SimResult> = results.iter().map(|r| r.inner.clone()).collect();
    harness::write_csv(&rows)
}

#[pymodule]
fn pyocclusion(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NO_VALID_SENTINEL", occlusion_sim::NO_VALID_SENTINEL)?;
    m.add_class::<PyScenarioConfig>()?;
    m.add_class::<PySimResult>()?;
    m.add_function(wrap_pyfunction!(to_si, m)?)?;
    m.add_function(wrap_pyfunction!(quadratic_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(ttc, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(decel_of, m)?)?;
    m.add_function(wrap_pyfunction!(derive_tau_max, m)?)?;
    m.add_function(wrap_pyfunction!(los_occluded, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(write_csv, m)?)?;
    Ok(())
}
