//! Explicit Euler scheme for `dX = a(X) dt + dw`.

use crate::path::{Path, TimeGrid};
use crate::rng::RngStream;
use crate::wiener::{bridge_crossing_prob, BridgeExtrema, Increments};

/// Largest step that resolves a drift layer of half-width `epsilon`.
pub fn recommended_dt(epsilon: f64) -> f64 {
    epsilon * epsilon / 25.0
}

/// Warning text if `dt` is coarser than [`recommended_dt`].
pub fn dt_policy_warning(dt: f64, epsilon: f64) -> Option<String> {
    let max = recommended_dt(epsilon);
    (dt > max * (1.0 + 1e-12)).then(|| {
        format!(
            "dt = {dt:e} exceeds eps^2/25 = {max:e}; the drift layer [-eps, eps] is under-resolved"
        )
    })
}

pub fn euler_sde<F: Fn(f64) -> f64>(grid: &TimeGrid, x0: f64, drift: F, stream: RngStream) -> Path {
    let mut st = EulerStepper::new(x0, grid.dt(), drift, stream);
    let mut values = Vec::with_capacity(grid.len());
    values.push(x0);
    for _ in 0..grid.n_steps() {
        values.push(st.step());
    }
    Path::from_parts(*grid, values)
}

/// Euler chain advanced one step at a time, for samplers that stop early.
pub struct EulerStepper<F> {
    x: f64,
    dt: f64,
    drift: F,
    inc: Increments,
}

impl<F: Fn(f64) -> f64> EulerStepper<F> {
    pub fn new(x0: f64, dt: f64, drift: F, stream: RngStream) -> Self {
        Self {
            x: x0,
            dt,
            drift,
            inc: Increments::new(stream, dt),
        }
    }

    pub fn value(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn step(&mut self) -> f64 {
        self.x = self.x + (self.drift)(self.x) * self.dt + self.inc.next();
        self.x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Barrier {
    Lower,
    Upper,
}

/// Exit of an Euler chain from `(lower, upper)`, tested on the continuous
/// interpolant.
///
/// Inside a step the Euler interpolant is Brownian motion with constant
/// drift, hence a Brownian bridge given its endpoints; a barrier is touched
/// with the bridge crossing probability. One uniform is drawn per step.
pub struct BridgedExit<F> {
    stepper: EulerStepper<F>,
    bridge: BridgeExtrema,
    lower: f64,
    upper: f64,
    steps: u64,
}

impl<F: Fn(f64) -> f64> BridgedExit<F> {
    pub fn new(x0: f64, lower: f64, upper: f64, dt: f64, drift: F, stream: RngStream) -> Self {
        Self {
            stepper: EulerStepper::new(x0, dt, drift, stream),
            bridge: BridgeExtrema::new(stream, dt),
            lower,
            upper,
            steps: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn value(&self) -> f64 {
        self.stepper.value()
    }

    /// Advance until exit or until `max_steps` steps have been taken in total.
    pub fn run_until(&mut self, max_steps: u64) -> Option<Barrier> {
        let dt = self.stepper.dt;
        while self.steps < max_steps {
            let a = self.stepper.value();
            let b = self.stepper.step();
            let u = self.bridge.uniform();
            self.steps += 1;
            if b <= self.lower {
                return Some(Barrier::Lower);
            }
            if b >= self.upper {
                return Some(Barrier::Upper);
            }
            let pl = bridge_crossing_prob(a, b, self.lower, dt);
            if u < pl {
                return Some(Barrier::Lower);
            }
            if u < pl + bridge_crossing_prob(a, b, self.upper, dt) {
                return Some(Barrier::Upper);
            }
        }
        None
    }
}
