//! Scale function of `dX = a_ε(X) dt + dw` and the quantities built on it.
//!
//! In the rescaled variable `y = x / ε` the scale density is
//! `exp(-2 L A(y))`, so every ratio below depends on `L` only.

use statrs::function::gamma::gamma;

use super::quad::integrate;
use super::spec::DriftSpec;
use crate::error::{invalid, Error, Result};
use crate::skorokhod::Side;

pub const SCALE_REL_TOL: f64 = 1e-10;

/// 0, ±1 and ±2^{-k}: the integrand peaks at 0 and may kink at ±1.
pub(crate) fn peak_breaks() -> Vec<f64> {
    let mut b = vec![0.0, 1.0, -1.0];
    for k in 1..=64 {
        let x = 2f64.powi(-k);
        b.push(x);
        b.push(-x);
    }
    b
}

/// `∫_lo^hi exp(-2 L A(y)) dy`, exact outside `[-1, 1]` where `A` is flat.
pub fn scale_integral(d: &DriftSpec, l: f64, lo: f64, hi: f64) -> Result<f64> {
    if lo > hi {
        return scale_integral(d, l, hi, lo).map(|v| -v);
    }
    if l == 0.0 {
        return Ok(hi - lo);
    }
    let mut total = 0.0;
    if hi > 1.0 {
        total += (hi - lo.max(1.0)) * (-2.0 * l * d.a_plus()).exp();
    }
    if lo < -1.0 {
        total += (hi.min(-1.0) - lo) * (-2.0 * l * d.a_minus()).exp();
    }
    let (a, b) = (lo.max(-1.0), hi.min(1.0));
    if a < b {
        total += integrate(
            |y| (-2.0 * l * d.big_a(y)).exp(),
            a,
            b,
            &peak_breaks(),
            SCALE_REL_TOL,
        )?;
    }
    Ok(total)
}

/// `s_ε(x) = ε ∫_0^{x/ε} exp(-2 L A(y)) dy`.
pub fn scale_function(d: &DriftSpec, l: f64, epsilon: f64, x: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("must be > 0, got {epsilon}")));
    }
    if l == 0.0 {
        return Ok(x);
    }
    Ok(epsilon * scale_integral(d, l, 0.0, x / epsilon)?)
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if !(den > 0.0 && den.is_finite()) {
        return Err(Error::DegenerateScale);
    }
    Ok(num / den)
}

/// Plus side: `P(reach -ε before 2ε | X(0) = ε)`; minus side: the mirror
/// event `P(reach ε before -2ε | X(0) = -ε)`.
pub fn hitting_prob_analytic(d: &DriftSpec, l: f64, epsilon: f64, side: Side) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("must be > 0, got {epsilon}")));
    }
    match side {
        Side::Positive => ratio(
            scale_integral(d, l, 1.0, 2.0)?,
            scale_integral(d, l, -1.0, 2.0)?,
        ),
        Side::Negative => ratio(
            scale_integral(d, l, -2.0, -1.0)?,
            scale_integral(d, l, -2.0, 1.0)?,
        ),
    }
}

/// `P(reach -2ε before 2ε | X(0) = 0)` at finite `ε`.
pub fn crossing_split_exact(d: &DriftSpec, l: f64) -> Result<f64> {
    ratio(
        scale_integral(d, l, 0.0, 2.0)?,
        scale_integral(d, l, -2.0, 2.0)?,
    )
}

/// `∫_{-1}^2 exp(-2 L A(y)) dy`.
pub fn laplace_integral(d: &DriftSpec, l: f64) -> Result<f64> {
    scale_integral(d, l, -1.0, 2.0)
}

/// `Γ(1 + 1/λ) L^{-1/λ} (c_-^{-1/λ} + c_+^{-1/λ})`.
pub fn laplace_asymptotic(d: &DriftSpec, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(invalid("L", format!("must be > 0, got {l}")));
    }
    let r = 1.0 / d.lambda();
    Ok(gamma(1.0 + r) * l.powf(-r) * (d.c_minus().powf(-r) + d.c_plus().powf(-r)))
}
