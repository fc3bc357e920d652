//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{agrees, brake_window, random_states, stepping_oracle, R_SUM};
use occlusion_sim::{
    classify_ttc, decide, quadratic_coeffs, run_scenario, sweep, write_csv, BrakePolicy,
    RelativeState, ScenarioConfig, SimResult, StepRecord, Strategy, SweepSpec, TtcOutcome, Vec2,
    NO_VALID_SENTINEL,
};

const ORACLE_SEED: u64 = 20_240_901;
const ORACLE_STATES: usize = 1000;
const ORACLE_TAU_TOL: f64 = 1e-4;
const ORACLE_TAG_AGREEMENT: f64 = 1.0;
const ORACLE_BUDGET: Duration = Duration::from_secs(30);

const LINEARITY_SAMPLES: usize = 100;
/// A few ulps of the full-scale pressure.
const LINEARITY_TOL: f64 = 4.0 * f64::EPSILON * 200.0;

const SPEEDS_MPH: [f64; 13] = [
    10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0, 65.0, 70.0,
];
const NO_COLLISION_SPEED_MPH: f64 = 10.0;
const WITHOUT_V2V_TTC_MAX: f64 = 0.2;
const WITH_V2V_TTC_MIN: f64 = 2.0;
const TREND_FROM_MPH: f64 = 20.0;
const MONOTONE_TOL: f64 = 0.0;
const P_MAX: f64 = 200.0;

struct Run {
    result: SimResult,
    trace: Vec<StepRecord>,
}

struct Sweep {
    with: Vec<Run>,
    without: Vec<Run>,
}

fn base(speed: f64, v2v: bool) -> ScenarioConfig {
    ScenarioConfig {
        av_speed_mph: speed,
        v2v,
        ..ScenarioConfig::default()
    }
}

fn run_all(v2v: bool) -> Vec<Run> {
    SPEEDS_MPH
        .iter()
        .map(|&s| {
            let (result, trace) = run_scenario(&base(s, v2v)).expect("scenario runs");
            Run { result, trace }
        })
        .collect()
}

fn first_tau(r: &SimResult) -> Option<f64> {
    r.first_ttc.and_then(TtcOutcome::tau)
}

fn fmt_tau(t: Option<f64>) -> String {
    t.map_or("none".into(), |t| format!("{t:.4}"))
}

type Outcome = (bool, String);

fn c1_oracle() -> Outcome {
    let start = Instant::now();
    let states = random_states(ORACLE_SEED, ORACLE_STATES);
    let (mut tags, mut within, mut worst) = (0usize, 0usize, 0.0f64);
    for &(x, v) in &states {
        let solver = classify_ttc(&quadratic_coeffs(&RelativeState {
            x_rel: Vec2::new(x.0, x.1),
            v_rel: Vec2::new(v.0, v.1),
            r_sum: R_SUM,
        }));
        let oracle = stepping_oracle(x, v, R_SUM);
        if solver.is_valid() == oracle.is_some() {
            tags += 1;
        }
        if agrees(solver, oracle, ORACLE_TAU_TOL) {
            within += 1;
        }
        if let (Some(a), Some(b)) = (solver.tau(), oracle) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    let rate = tags as f64 / states.len() as f64;
    let collisions = states
        .iter()
        .filter(|(x, v)| stepping_oracle(*x, *v, R_SUM).is_some())
        .count();
    (
        rate >= ORACLE_TAG_AGREEMENT && within == states.len() && elapsed < ORACLE_BUDGET,
        format!(
            "{tags}/{n} tags agree, {within}/{n} within {ORACLE_TAU_TOL:e} s (max |dtau| {worst:.2e}, {collisions} on collision course), {:.2} s",
            elapsed.as_secs_f64(),
            n = states.len(),
        ),
    )
}

fn c2_brake_law() -> Outcome {
    let p = BrakePolicy::default();
    let at = |t: f64| decide(TtcOutcome::Collision(t), &p).pressure;
    let exact = at(6.0) == 80.0 && at(12.0) == 0.0 && at(0.0) == 200.0;
    let mut worst = 0.0f64;
    for k in 0..LINEARITY_SAMPLES {
        let tau = p.tau_max * k as f64 / LINEARITY_SAMPLES as f64;
        worst = worst.max((at(tau) - (P_MAX - 20.0 * tau)).abs());
    }
    (
        exact && worst <= LINEARITY_TOL,
        format!(
            "P(6)={} P(12)={} P(0)={}, max linearity error {worst:.1e} over {LINEARITY_SAMPLES} samples",
            at(6.0),
            at(12.0),
            at(0.0)
        ),
    )
}

fn c3_collision_pattern(s: &Sweep) -> Outcome {
    let with_bad: Vec<f64> = s
        .with
        .iter()
        .filter(|r| r.result.collision)
        .map(|r| r.result.av_speed_mph)
        .collect();
    let without_bad: Vec<f64> = s
        .without
        .iter()
        .filter(|r| r.result.collision != (r.result.av_speed_mph > NO_COLLISION_SPEED_MPH))
        .map(|r| r.result.av_speed_mph)
        .collect();
    let hits: Vec<f64> = s
        .without
        .iter()
        .filter(|r| r.result.collision)
        .map(|r| r.result.av_speed_mph)
        .collect();
    (
        with_bad.is_empty() && without_bad.is_empty(),
        format!("with V2V collisions at {with_bad:?}; without V2V collisions at {hits:?}, mismatches at {without_bad:?}"),
    )
}

fn c4_first_ttc(s: &Sweep) -> Outcome {
    let without_max = s
        .without
        .iter()
        .filter_map(|r| first_tau(&r.result))
        .fold(0.0, f64::max);
    let without_ok = s
        .without
        .iter()
        .all(|r| first_tau(&r.result).is_some_and(|t| t < WITHOUT_V2V_TTC_MAX));
    let with_min = s
        .with
        .iter()
        .filter_map(|r| first_tau(&r.result))
        .fold(f64::INFINITY, f64::min);
    let with_ok = s
        .with
        .iter()
        .all(|r| first_tau(&r.result).is_some_and(|t| t > WITH_V2V_TTC_MIN));
    (
        without_ok && with_ok,
        format!(
            "without V2V max first TTC {without_max:.4} s (need < {WITHOUT_V2V_TTC_MAX}); with V2V min first TTC {with_min:.4} s (need > {WITH_V2V_TTC_MIN})"
        ),
    )
}

fn c5_speed_trend(s: &Sweep) -> Outcome {
    let seq: Vec<(f64, Option<f64>)> = s
        .with
        .iter()
        .filter(|r| r.result.av_speed_mph >= TREND_FROM_MPH)
        .map(|r| (r.result.av_speed_mph, first_tau(&r.result)))
        .collect();
    let ok = seq.windows(2).all(|w| match (w[0].1, w[1].1) {
        (Some(a), Some(b)) => b < a,
        _ => false,
    });
    let shown: Vec<String> = seq
        .iter()
        .map(|(v, t)| format!("{v}:{}", fmt_tau(*t)))
        .collect();
    (
        ok,
        format!("with V2V first TTC by speed [{}]", shown.join(" ")),
    )
}

fn c6_brake_trend(s: &Sweep) -> Outcome {
    let mut failures = Vec::new();
    for r in &s.with {
        let speed = r.result.av_speed_mph;
        let (first, clear) = brake_window(&r.trace);
        let (Some(fb), Some(cl)) = (first, clear) else {
            failures.push(format!("{speed}: no brake window"));
            continue;
        };
        let ttc: Vec<f64> = r.trace[fb..cl]
            .iter()
            .map(StepRecord::ttc_serialized)
            .collect();
        let drops = ttc
            .windows(2)
            .filter(|w| w[1] < w[0] - MONOTONE_TOL)
            .count();
        if drops > 0 {
            let (i, w) = ttc
                .windows(2)
                .enumerate()
                .find(|(_, w)| w[1] < w[0] - MONOTONE_TOL)
                .unwrap();
            failures.push(format!(
                "{speed}: {drops} decreases, first at t={:.2} ({:.4}->{:.4})",
                r.trace[fb + i].t,
                w[0],
                w[1]
            ));
        }
        if r.trace.last().map(StepRecord::ttc_serialized) != Some(NO_VALID_SENTINEL) {
            failures.push(format!("{speed}: no return to sentinel"));
        }
    }
    let detail = if failures.is_empty() {
        "TTC nondecreasing from first brake to clearance in every with-V2V run".to_string()
    } else {
        failures.join("; ")
    };
    (failures.is_empty(), detail)
}

fn c7_pressure(s: &Sweep) -> Outcome {
    let with_max = s
        .with
        .iter()
        .map(|r| r.result.max_pressure)
        .fold(0.0, f64::max);
    let colliding: Vec<(f64, f64)> = s
        .without
        .iter()
        .filter(|r| r.result.collision)
        .map(|r| (r.result.av_speed_mph, r.result.max_pressure))
        .collect();
    let ok = with_max < P_MAX && colliding.iter().all(|&(_, p)| p == P_MAX);
    (
        ok,
        format!("with V2V max pressure {with_max:.4}; colliding without-V2V runs (speed, max pressure) {colliding:?}"),
    )
}

fn c8_determinism() -> Outcome {
    let spec = SweepSpec::new(ScenarioConfig::default());
    let a = write_csv(&sweep(&spec).expect("sweep runs"));
    let b = write_csv(&sweep(&spec).expect("sweep runs"));
    let cli = || {
        Command::new(env!("CARGO_BIN_EXE_occlusion-sim"))
            .args(["sweep", "--speeds", "10:70:5"])
            .output()
            .expect("binary runs")
            .stdout
    };
    let (c, d) = (cli(), cli());
    let ok = a == b && c == d && c == a.as_bytes();
    (
        ok,
        format!(
            "library and CLI sweeps, {} bytes, {} rows",
            a.len(),
            a.lines().count() - 1
        ),
    )
}

fn c9_calibration() -> Outcome {
    let mut misses = Vec::new();
    for &speed in &SPEEDS_MPH {
        for st in Strategy::BOTH {
            let cfg = ScenarioConfig {
                braking: false,
                ..base(speed, st.v2v())
            };
            if !run_scenario(&cfg).expect("scenario runs").0.collision {
                misses.push(format!("{speed}/{st}"));
            }
        }
    }
    (
        misses.is_empty(),
        format!("{} unbraked runs, misses {misses:?}", SPEEDS_MPH.len() * 2),
    )
}

fn main() -> ExitCode {
    let sweep = Sweep {
        with: run_all(true),
        without: run_all(false),
    };
    let outcomes = [
        ("TTC oracle equivalence", c1_oracle()),
        ("brake law exactness", c2_brake_law()),
        ("collision pattern", c3_collision_pattern(&sweep)),
        ("first TTC with and without V2V", c4_first_ttc(&sweep)),
        ("first TTC decreases with speed", c5_speed_trend(&sweep)),
        ("TTC nondecreasing while braking", c6_brake_trend(&sweep)),
        ("proportional pressure", c7_pressure(&sweep)),
        ("determinism", c8_determinism()),
        ("calibration premise", c9_calibration()),
    ];
    let mut failed = 0;
    for (i, (name, (ok, detail))) in outcomes.iter().enumerate() {
        println!(
            "criterion {} [{}] {name}: {detail}",
            i + 1,
            if *ok { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!ok);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
