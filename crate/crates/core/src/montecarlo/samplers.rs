//! Single-draw marginals used by the convergence experiments.

use crate::drift::ScaledDrift;
use crate::error::Result;
use crate::path::TimeGrid;
use crate::processes::{
    sample_hard_membrane, sample_killed_ladder, sample_reflected_bm, BridgedExit, EulerStepper,
    HardMembraneParams,
};
use crate::rng::{Channel, RngStream};
use crate::skorokhod::Side;

/// `X_ε(t)` by Euler with step at most `dt`, without storing the path.
pub fn euler_terminal(
    drift: &ScaledDrift,
    x0: f64,
    dt: f64,
    t: f64,
    stream: RngStream,
) -> Result<f64> {
    let grid = TimeGrid::with_max_step(t, dt)?;
    let mut st = EulerStepper::new(x0, grid.dt(), |x| drift.eval(x), stream);
    for _ in 0..grid.n_steps() {
        st.step();
    }
    Ok(st.value())
}

/// `X_ε(t ∧ ζ_ε)` with `ζ_ε` the first time `X_ε` reaches `-ε`, detected on
/// the continuous Euler interpolant.
pub fn killed_euler_terminal(
    drift: &ScaledDrift,
    x0: f64,
    epsilon: f64,
    dt: f64,
    t: f64,
    stream: RngStream,
) -> Result<f64> {
    let grid = TimeGrid::with_max_step(t, dt)?;
    let kill = -epsilon;
    let mut run = BridgedExit::new(
        x0,
        kill,
        f64::INFINITY,
        grid.dt(),
        |x| drift.eval(x),
        stream,
    );
    Ok(match run.run_until(grid.n_steps() as u64) {
        Some(_) => kill,
        None => run.value(),
    })
}

pub fn hard_membrane_terminal(
    grid: &TimeGrid,
    x0: f64,
    params: HardMembraneParams,
    stream: RngStream,
) -> Result<f64> {
    Ok(sample_hard_membrane(grid, x0, params, stream)?.path.last())
}

pub fn reflected_terminal(grid: &TimeGrid, x0: f64, stream: RngStream) -> f64 {
    sample_reflected_bm(grid, x0, Side::Positive, stream)
        .0
        .last()
}

/// `x̃_ε(t ∧ ζ̃_ε)` of the geometrically killed ladder with `p = α ε`.
pub fn killed_ladder_marginal(
    grid: &TimeGrid,
    x0: f64,
    epsilon: f64,
    alpha: f64,
    t: f64,
    stream: RngStream,
) -> Result<f64> {
    let kl = sample_killed_ladder(grid, x0, epsilon, (alpha * epsilon).min(1.0), stream)?;
    Ok(kl.ladder.x_tilde[kl.stopped_index(t)])
}

/// Reflected Brownian motion stopped when its local time first reaches an
/// independent `Exp(α)` level, evaluated at `t`.
pub fn killed_reflected_marginal(
    grid: &TimeGrid,
    x0: f64,
    alpha: f64,
    t: f64,
    stream: RngStream,
) -> f64 {
    let (g, l) = sample_reflected_bm(grid, x0, Side::Positive, stream);
    let level = stream.rng(Channel::Aux).exponential(alpha);
    let end = grid.index_at(t);
    let stop = l.values()[..=end]
        .iter()
        .position(|&v| v >= level)
        .unwrap_or(end);
    g[stop]
}
