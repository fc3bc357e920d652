#![allow(dead_code)]

use occlusion_sim::harness::StepRecord;
use occlusion_sim::ttc::TtcOutcome;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const R_SUM: f64 = 3.74904;

/// Smallest time step of the stepping oracle, s.
pub const ORACLE_DT: f64 = 1e-5;

fn dist(x: (f64, f64), v: (f64, f64), t: f64) -> f64 {
    (x.0 + v.0 * t).hypot(x.1 + v.1 * t)
}

/// First time the moving point `x + v t` comes within `r` of the origin,
/// found by marching forward and bisecting the bracketing step. Steps are
/// never shorter than [`ORACLE_DT`] and never long enough to jump over a
/// contact. Once the distance grows the path is past closest approach and
/// can never come back.
pub fn stepping_oracle(x: (f64, f64), v: (f64, f64), r: f64) -> Option<f64> {
    let speed = v.0.hypot(v.1);
    let mut t = 0.0;
    let mut d = dist(x, v, 0.0);
    if d <= r {
        return Some(0.0);
    }
    if speed == 0.0 {
        return None;
    }
    loop {
        let h = ((d - r) / speed).max(ORACLE_DT);
        let next = dist(x, v, t + h);
        if next <= r {
            let (mut lo, mut hi) = (t, t + h);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if dist(x, v, mid) <= r {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-13 {
                    break;
                }
            }
            return Some(hi);
        }
        if next > d {
            return None;
        }
        t += h;
        d = next;
    }
}

/// Relative states with `|x|` in `[r, 200]` and `|v| <= 40`. Every other
/// state heads for a point within `2 r` of the origin so both contact and
/// miss cases are well represented.
pub fn random_states(seed: u64, n: usize) -> Vec<((f64, f64), (f64, f64))> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let radius = rng.random_range(R_SUM..=200.0);
            let x = (radius * th.cos(), radius * th.sin());
            let speed = 40.0 * rng.random::<f64>().sqrt();
            let phi = if i % 2 == 0 {
                rng.random_range(0.0..std::f64::consts::TAU)
            } else {
                let aim: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let miss = 2.0 * R_SUM * rng.random::<f64>();
                let target = (miss * aim.cos(), miss * aim.sin());
                (target.1 - x.1).atan2(target.0 - x.0)
            };
            (x, (speed * phi.cos(), speed * phi.sin()))
        })
        .collect()
}

pub fn agrees(solver: TtcOutcome, oracle: Option<f64>, tol: f64) -> bool {
    match (solver, oracle) {
        (TtcOutcome::NoValid, None) => true,
        (TtcOutcome::Collision(a), Some(b)) => (a - b).abs() <= tol,
        _ => false,
    }
}

/// Index of the first braking tick and of the tick from which TTC stays
/// invalid until the end of the trace.
pub fn brake_window(trace: &[StepRecord]) -> (Option<usize>, Option<usize>) {
    let first_brake = trace.iter().position(|r| r.pressure > 0.0);
    let clear = first_brake.and_then(|fb| {
        let tail = trace[fb..]
            .iter()
            .rev()
            .take_while(|r| r.ttc == TtcOutcome::NoValid)
            .count();
        (tail > 0).then(|| trace.len() - tail)
    });
    (first_brake, clear)
}
