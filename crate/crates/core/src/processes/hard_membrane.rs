//! Brownian motion with a hard membrane at 0.
//!
//! The process reflects into its current half-line until the local time
//! accumulated in the current phase reaches an independent `Exp(α^side)`
//! level; it then switches side and starts a new phase from 0. All phases
//! are driven by the increments of one Wiener path.

use serde::{Deserialize, Serialize};

use super::reflected::Reflector;
use crate::error::{invalid, Result};
use crate::path::{Path, StepFunction, TimeGrid};
use crate::rng::{Channel, RngStream};
use crate::skorokhod::Side;
use crate::wiener::{BridgeExtrema, Increments};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardMembraneParams {
    alpha_plus: f64,
    alpha_minus: f64,
    initial_sign: i8,
}

impl HardMembraneParams {
    pub fn new(alpha_plus: f64, alpha_minus: f64, initial_sign: i8) -> Result<Self> {
        for (name, a) in [("alpha_plus", alpha_plus), ("alpha_minus", alpha_minus)] {
            if !(a > 0.0 && a.is_finite()) {
                return Err(invalid(
                    name,
                    format!("rate must be finite and > 0, got {a}"),
                ));
            }
        }
        if initial_sign.abs() != 1 {
            return Err(invalid(
                "initial_sign",
                format!("must be +1 or -1, got {initial_sign}"),
            ));
        }
        Ok(Self {
            alpha_plus,
            alpha_minus,
            initial_sign,
        })
    }

    pub fn alpha_plus(&self) -> f64 {
        self.alpha_plus
    }

    pub fn alpha_minus(&self) -> f64 {
        self.alpha_minus
    }

    pub fn initial_sign(&self) -> i8 {
        self.initial_sign
    }

    pub fn rate(&self, side: Side) -> f64 {
        match side {
            Side::Positive => self.alpha_plus,
            Side::Negative => self.alpha_minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardMembranePath {
    pub path: Path,
    pub sign: StepFunction,
    pub local_time: Path,
    pub flip_times: Vec<f64>,
    /// Local time accumulated by each completed phase, which is the
    /// threshold that ended it.
    pub phase_local_times: Vec<f64>,
}

impl HardMembranePath {
    /// Sign at grid index `i`.
    pub fn sign_at(&self, i: usize) -> i8 {
        self.sign.eval(self.path.grid().time(i))
    }
}

pub fn sample_hard_membrane(
    grid: &TimeGrid,
    x0: f64,
    params: HardMembraneParams,
    stream: RngStream,
) -> Result<HardMembranePath> {
    if x0 != 0.0 && (x0 > 0.0) != (params.initial_sign > 0) {
        return Err(invalid(
            "initial_sign",
            format!(
                "must equal sgn(x0) when x0 != 0, got x0 = {x0}, sign = {}",
                params.initial_sign
            ),
        ));
    }
    let dt = grid.dt();
    let mut inc = Increments::new(stream, dt);
    let mut bridge = BridgeExtrema::new(stream, dt);
    let mut aux = stream.rng(Channel::Aux);

    let mut side = Side::from_sign(params.initial_sign).expect("validated sign");
    let mut threshold = aux.exponential(params.rate(side));
    let mut refl = Reflector::new(side);
    // driving path of the current phase: f = start + (w - w_start)
    let mut f = x0;
    let mut completed = 0.0;

    let mut values = Vec::with_capacity(grid.len());
    let mut local = Vec::with_capacity(grid.len());
    let mut flip_times = Vec::new();
    let mut flip_values = Vec::new();
    let mut phase_local_times = Vec::new();
    values.push(x0);
    local.push(0.0);

    for i in 1..=grid.n_steps() {
        let next = f + inc.next();
        let ext = bridge.extremum(f, next, side == Side::Positive);
        f = next;
        let reg = refl.push_extremum(ext);
        if reg >= threshold {
            // phase ends at this grid point with its regulator at the
            // threshold; restart from 0 on the other side
            completed += threshold;
            phase_local_times.push(threshold);
            side = side.flip();
            flip_times.push(grid.time(i));
            flip_values.push(side.sign() as i8);
            threshold = aux.exponential(params.rate(side));
            refl = Reflector::new(side);
            f = 0.0;
            values.push(0.0);
            local.push(completed);
        } else {
            values.push(refl.value(f));
            local.push(completed + reg);
        }
    }

    let sign = StepFunction::new(
        params.initial_sign,
        flip_times.clone(),
        flip_values,
        grid.horizon(),
    )?;
    Ok(HardMembranePath {
        path: Path::from_parts(*grid, values),
        sign,
        local_time: Path::from_parts(*grid, local),
        flip_times,
        phase_local_times,
    })
}
