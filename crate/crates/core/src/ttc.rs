//! Time-to-collision between two bounding circles moving at constant velocity.
//!
//! The touching condition `|X + v t| = R` expands to
//! `(v·v) t² + 2 (X·v) t + (X·X − R²) = 0`; the smallest admissible root is the
//! TTC. Validity follows the usual sign rules: no real root or two negative
//! roots means no collision course.

use crate::geometry::{relative_state, ActorState, RelativeState};

/// Serialized stand-in for "no valid TTC" in traces and result tables.
pub const NO_VALID_SENTINEL: f64 = 10_000.0;

/// Coefficients of the touching-time quadratic, halved linear term convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticDiag {
    /// `v·v`
    pub a: f64,
    /// `X·v`
    pub b: f64,
    /// `X·X − R²`
    pub c: f64,
    /// Reduced discriminant `b² − a·c`.
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TtcOutcome {
    NoValid,
    /// Seconds until the circles touch; finite and nonnegative.
    Collision(f64),
}

impl TtcOutcome {
    pub fn tau(self) -> Option<f64> {
        match self {
            TtcOutcome::NoValid => None,
            TtcOutcome::Collision(t) => Some(t),
        }
    }

    pub fn is_valid(self) -> bool {
        matches!(self, TtcOutcome::Collision(_))
    }

    /// Value written to CSV: the TTC itself, or the 10000 s sentinel.
    pub fn serialized(self) -> f64 {
        self.tau().unwrap_or(NO_VALID_SENTINEL)
    }
}

pub fn quadratic_coeffs(rel: &RelativeState) -> QuadraticDiag {
    let a = rel.v_rel.dot(rel.v_rel);
    let b = rel.x_rel.dot(rel.v_rel);
    let c = rel.x_rel.dot(rel.x_rel) - rel.r_sum * rel.r_sum;
    QuadraticDiag {
        a,
        b,
        c,
        d: b * b - a * c,
    }
}

pub fn classify_ttc(diag: &QuadraticDiag) -> TtcOutcome {
    let QuadraticDiag { a, b, c, d } = *diag;

    // Already touching or overlapping: the risk is immediate. This also covers
    // a root exactly at zero and the straddling-roots case.
    if c <= 0.0 {
        return TtcOutcome::Collision(0.0);
    }
    if a == 0.0 || d < 0.0 {
        return TtcOutcome::NoValid;
    }

    // c > 0 and a > 0, so both roots share a sign (their product is c / a).
    let sqrt_d = d.sqrt();
    let q = -(b + sqrt_d.copysign(b));
    if q == 0.0 {
        // b == 0 and d == 0 imply c == 0, handled above.
        return TtcOutcome::NoValid;
    }
    let r1 = q / a;
    let r2 = c / q;
    let (near, far) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };

    if far < 0.0 {
        TtcOutcome::NoValid
    } else if near >= 0.0 {
        TtcOutcome::Collision(near)
    } else {
        // Unreachable with c > 0; kept so a rounding flip can never yield a
        // negative time.
        TtcOutcome::Collision(far.max(0.0))
    }
}

pub fn ttc(ped: &ActorState, av: &ActorState) -> TtcOutcome {
    classify_ttc(&quadratic_coeffs(&relative_state(ped, av)))
}
