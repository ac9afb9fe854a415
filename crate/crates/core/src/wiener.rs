//! Wiener increments and exact Brownian-bridge extrema between grid points.

use crate::path::{Path, TimeGrid};
use crate::rng::{Channel, PhiloxRng, RngStream};

/// Sequential source of `N(0, dt)` increments for one stream.
#[derive(Debug, Clone)]
pub struct Increments {
    rng: PhiloxRng,
    sqrt_dt: f64,
}

impl Increments {
    pub fn new(stream: RngStream, dt: f64) -> Self {
        Self {
            rng: stream.rng(Channel::Increments),
            sqrt_dt: dt.sqrt(),
        }
    }

    #[inline]
    pub fn next(&mut self) -> f64 {
        self.sqrt_dt * self.rng.standard_normal()
    }
}

/// Uniforms used to place the continuous-path extremum inside each step.
///
/// They come from their own channel, one per step, so a sampler that needs
/// the minimum on one step and the maximum on the next still consumes the
/// same sequence as one that always asks for minima.
#[derive(Debug, Clone)]
pub struct BridgeExtrema {
    rng: PhiloxRng,
    dt: f64,
}

impl BridgeExtrema {
    pub fn new(stream: RngStream, dt: f64) -> Self {
        Self {
            rng: stream.rng(Channel::Bridge),
            dt,
        }
    }

    /// Draw the next uniform and turn it into the minimum of a Brownian
    /// bridge from `a` to `b` over one step.
    #[inline]
    pub fn min(&mut self, a: f64, b: f64) -> f64 {
        let u = self.rng.open01();
        bridge_min(a, b, self.dt, u)
    }

    #[inline]
    pub fn max(&mut self, a: f64, b: f64) -> f64 {
        let u = self.rng.open01();
        -bridge_min(-a, -b, self.dt, u)
    }

    /// Minimum if `lower` is set, maximum otherwise, consuming one uniform.
    #[inline]
    pub fn extremum(&mut self, a: f64, b: f64, lower: bool) -> f64 {
        if lower {
            self.min(a, b)
        } else {
            self.max(a, b)
        }
    }

    /// One uniform for a Bernoulli crossing test.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.open01()
    }
}

/// Minimum of a unit-variance Brownian bridge from `a` to `b` over time `dt`
/// by inversion of `P(min <= m) = exp(-2 (a - m)(b - m) / dt)`.
#[inline]
pub fn bridge_min(a: f64, b: f64, dt: f64, u: f64) -> f64 {
    let d = b - a;
    0.5 * (a + b - (d * d - 2.0 * dt * u.ln()).sqrt())
}

/// Probability that a Brownian bridge from `a` to `b` over `dt` touches
/// `level`, given that both endpoints lie strictly on the same side of it.
#[inline]
pub fn bridge_crossing_prob(a: f64, b: f64, level: f64, dt: f64) -> f64 {
    let p = (-2.0 * (a - level) * (b - level) / dt).exp();
    if (a - level) * (b - level) <= 0.0 {
        1.0
    } else {
        p
    }
}

/// Wiener path on `grid` started from `x0`.
pub fn sample_wiener(grid: &TimeGrid, x0: f64, stream: RngStream) -> Path {
    let mut inc = Increments::new(stream, grid.dt());
    let mut values = Vec::with_capacity(grid.len());
    let mut x = x0;
    values.push(x);
    for _ in 0..grid.n_steps() {
        x += inc.next();
        values.push(x);
    }
    Path::from_parts(*grid, values)
}
