//! Uniform time grids, sampled paths and elementary path functionals.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Uniform grid on `[0, horizon]` with `n_steps` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "horizon must be finite and > 0, got {horizon}"
            )));
        }
        if n_steps == 0 {
            return Err(Error::InvalidGrid("n_steps must be >= 1".into()));
        }
        Ok(Self { horizon, n_steps })
    }

    /// Grid with the largest step not exceeding `max_dt`.
    pub fn with_max_step(horizon: f64, max_dt: f64) -> Result<Self> {
        if !(max_dt.is_finite() && max_dt > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "max_dt must be > 0, got {max_dt}"
            )));
        }
        let n = (horizon / max_dt * (1.0 - 1e-12)).ceil().max(1.0);
        Self::new(horizon, n as usize)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    /// `t_i = i * dt`, recomputed rather than accumulated.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt()
    }

    /// Index of the last grid point not after `t` (clamped to the grid).
    pub fn index_at(&self, t: f64) -> usize {
        if t <= 0.0 {
            return 0;
        }
        let i = (t / self.dt() * (1.0 + 1e-12)).floor() as usize;
        i.min(self.n_steps)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(move |i| self.time(i))
    }
}

/// A real trajectory sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl Path {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(
                "values",
                format!("expected {} values, got {}", grid.len(), values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid("values", format!("non-finite value at index {i}")));
        }
        Ok(Self { grid, values })
    }

    /// Build a path whose values are known to be valid.
    pub(crate) fn from_parts(grid: TimeGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.times().map(f).collect())
    }

    pub fn constant(grid: TimeGrid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Value at the last grid point not after `t`.
    pub fn at(&self, t: f64) -> f64 {
        self.values[self.grid.index_at(t)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }
}

impl std::ops::Index<usize> for Path {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Right-continuous ±1 step function on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    initial: i8,
    jump_times: Vec<f64>,
    values: Vec<i8>,
}

impl StepFunction {
    pub fn new(initial: i8, jump_times: Vec<f64>, values: Vec<i8>, horizon: f64) -> Result<Self> {
        if initial.abs() != 1 || values.iter().any(|v| v.abs() != 1) {
            return Err(invalid("values", "step values must be +1 or -1"));
        }
        if jump_times.len() != values.len() {
            return Err(invalid("jump_times", "one value per jump time required"));
        }
        if jump_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(
                "jump_times",
                "jump times must be strictly increasing",
            ));
        }
        if jump_times.iter().any(|&t| !(0.0..=horizon).contains(&t)) {
            return Err(invalid(
                "jump_times",
                format!("jump times must lie in [0, {horizon}]"),
            ));
        }
        Ok(Self {
            initial,
            jump_times,
            values,
        })
    }

    pub fn constant(value: i8) -> Self {
        Self {
            initial: value,
            jump_times: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn initial(&self) -> i8 {
        self.initial
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Value at `t`; a jump at `t` is already in effect.
    pub fn eval(&self, t: f64) -> i8 {
        match self.jump_times.partition_point(|&s| s <= t) {
            0 => self.initial,
            k => self.values[k - 1],
        }
    }
}

/// `out[i] = min(p[0..=i])`.
pub fn running_min(p: &Path) -> Path {
    let mut m = f64::INFINITY;
    let values = p
        .values()
        .iter()
        .map(|&v| {
            m = m.min(v);
            m
        })
        .collect();
    Path::from_parts(*p.grid(), values)
}

/// Grid approximation of the modulus of continuity: the largest `|p(s) - p(t)|`
/// over grid pairs with `|s - t| <= delta`.
pub fn modulus_of_continuity(p: &Path, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(invalid("delta", format!("must be > 0, got {delta}")));
    }
    let span = ((delta / p.grid().dt()) * (1.0 + 1e-12)).floor() as usize;
    Ok(window_range_max(p.values(), span))
}

/// Largest `max - min` over all windows `v[i..=i+span]`.
pub(crate) fn window_range_max(v: &[f64], span: usize) -> f64 {
    if span == 0 || v.len() < 2 {
        return 0.0;
    }
    let span = span.min(v.len() - 1);
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best: f64 = 0.0;
    for (j, &x) in v.iter().enumerate() {
        while maxq.back().is_some_and(|&k| v[k] <= x) {
            maxq.pop_back();
        }
        maxq.push_back(j);
        while minq.back().is_some_and(|&k| v[k] >= x) {
            minq.pop_back();
        }
        minq.push_back(j);
        let lo = j.saturating_sub(span);
        while maxq.front().is_some_and(|&k| k < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&k| k < lo) {
            minq.pop_front();
        }
        best = best.max(v[maxq[0]] - v[minq[0]]);
    }
    best
}
