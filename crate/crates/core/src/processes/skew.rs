//! Skew Brownian motion sampled exactly step by step.
//!
//! The transition density over a step of length `dt` is
//! `p(x, y) = φ(x - y) + γ sgn(y) φ(|x| + |y|)` with `φ` the `N(0, dt)`
//! density. Its CDF has the closed form
//!
//! ```text
//! y <= 0:  F(y) = Φ((y - x)/σ) - γ Φ((y - |x|)/σ)
//! y >  0:  F(y) = Φ((y - x)/σ) - γ Φc((y + |x|)/σ)
//! ```
//!
//! which is inverted by bisection.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::path::{Path, TimeGrid};
use crate::rng::{Channel, RngStream};
use crate::stats::{normal_cdf, normal_sf};

const INVERSION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewParams {
    gamma: f64,
}

impl SkewParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.abs() <= 1.0) {
            return Err(invalid(
                "gamma",
                format!("|gamma| <= 1 required, got {gamma}"),
            ));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// `P(X_{t+dt} <= y | X_t = x)`.
pub fn skew_transition_cdf(x: f64, y: f64, dt: f64, gamma: f64) -> f64 {
    let s = dt.sqrt();
    if y <= 0.0 {
        normal_cdf((y - x) / s) - gamma * normal_cdf((y - x.abs()) / s)
    } else {
        normal_cdf((y - x) / s) - gamma * normal_sf((y + x.abs()) / s)
    }
}

/// `1 - F`, evaluated without cancellation in the upper tail.
fn skew_transition_sf(x: f64, y: f64, dt: f64, gamma: f64) -> f64 {
    let s = dt.sqrt();
    if y <= 0.0 {
        normal_sf((y - x) / s) + gamma * normal_cdf((y - x.abs()) / s)
    } else {
        normal_sf((y - x) / s) + gamma * normal_sf((y + x.abs()) / s)
    }
}

pub fn skew_transition_density(x: f64, y: f64, dt: f64, gamma: f64) -> f64 {
    let phi = |z: f64| (-z * z / (2.0 * dt)).exp() / (2.0 * std::f64::consts::PI * dt).sqrt();
    let sgn = if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    };
    phi(x - y) + gamma * sgn * phi(x.abs() + y.abs())
}

/// Draw `X_{t+dt}` given `X_t = x` from the uniform `u` by inverse CDF.
pub fn skew_step(x: f64, dt: f64, gamma: f64, u: f64) -> f64 {
    let s = dt.sqrt();
    // All mass sits within 40σ of ±|x|.
    let mut lo = -x.abs() - 40.0 * s;
    let mut hi = x.abs() + 40.0 * s;
    // Work on whichever tail keeps the target away from 1.
    let upper = u > 0.5;
    let target = if upper { 1.0 - u } else { u };
    while hi - lo > INVERSION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = if upper {
            skew_transition_sf(x, mid, dt, gamma) > target
        } else {
            skew_transition_cdf(x, mid, dt, gamma) < target
        };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn sample_skew_bm(grid: &TimeGrid, x0: f64, params: SkewParams, stream: RngStream) -> Path {
    let dt = grid.dt();
    let mut rng = stream.rng(Channel::Inversion);
    let mut values = Vec::with_capacity(grid.len());
    let mut x = x0;
    values.push(x);
    for _ in 0..grid.n_steps() {
        x = skew_step(x, dt, params.gamma, rng.open01());
        values.push(x);
    }
    Path::from_parts(*grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn rejects_out_of_range_gamma() {
        assert!(SkewParams::new(2.0).is_err());
        assert!(SkewParams::new(-1.01).is_err());
        assert!(SkewParams::new(f64::NAN).is_err());
        assert!(SkewParams::new(1.0).is_ok());
    }

    #[test]
    fn cdf_matches_integrated_density() {
        for &(x, gamma) in &[
            (0.0, 0.5),
            (0.3, -0.7),
            (-0.2, 1.0),
            (1.5, 0.9),
            (-0.05, -1.0),
        ] {
            let dt = 0.04;
            for &y in &[-0.6, -0.1, 0.0, 0.05, 0.4, 1.7] {
                let direct = skew_transition_cdf(x, y, dt, gamma);
                // one-sided limits at the jump of the density at 0
                let left =
                    |u: f64| skew_transition_density(x, u.min(-f64::MIN_POSITIVE), dt, gamma);
                let right =
                    |u: f64| skew_transition_density(x, u.max(f64::MIN_POSITIVE), dt, gamma);
                let quad = if y <= 0.0 {
                    simpson(left, -6.0, y, 40_000)
                } else {
                    simpson(left, -6.0, 0.0, 40_000) + simpson(right, 0.0, y, 40_000)
                };
                assert!(
                    (direct - quad).abs() < 1e-9,
                    "x={x} y={y} g={gamma}: {direct} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn cdf_limits_and_positive_mass() {
        let dt = 1.0;
        assert!(skew_transition_cdf(0.2, -50.0, dt, 0.3).abs() < 1e-15);
        assert!((skew_transition_cdf(0.2, 50.0, dt, 0.3) - 1.0).abs() < 1e-15);
        // from 0 the mass on (0, ∞) is (1 + γ)/2
        for g in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            assert!((1.0 - skew_transition_cdf(0.0, 0.0, dt, g) - (1.0 + g) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inversion_round_trips() {
        for &(x, g) in &[(0.0, 0.5), (0.7, -0.4), (-0.3, 1.0), (0.0, -1.0)] {
            for &u in &[1e-9, 0.01, 0.3, 0.5, 0.77, 0.999_999_9] {
                let y = skew_step(x, 0.01, g, u);
                let f = skew_transition_cdf(x, y, 0.01, g);
                assert!((f - u).abs() < 1e-9, "x={x} g={g} u={u}: F(y)={f}");
            }
        }
    }

    #[test]
    fn reflecting_gamma_stays_nonnegative() {
        let grid = TimeGrid::new(1.0, 20).unwrap();
        let p = SkewParams::new(1.0).unwrap();
        for k in 0..200 {
            let path = sample_skew_bm(&grid, 0.0, p, RngStream::new(6, k));
            assert!(path.values().iter().all(|&v| v >= -INVERSION_TOL));
        }
    }
}
