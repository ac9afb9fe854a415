//! Monte Carlo experiments. Path `i` always uses `RngStream::new(seed, i)`,
//! so results do not depend on the number of workers.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::report::{ks_two_sample_report, McReport, RunMeta};
use super::runner::par_map;
use crate::drift::{crossing_split_exact, crossing_split_limit, DriftSpec, ScaledDrift};
use crate::error::{invalid, Error, Result};
use crate::path::{modulus_of_continuity, TimeGrid};
use crate::processes::{
    dt_policy_warning, euler_sde, recommended_dt, sample_hard_membrane, sample_reflected_bm,
    Barrier, BridgedExit, HardMembraneParams, PassageSampler,
};
use crate::rng::{Channel, RngStream};
use crate::skorokhod::Side;
use crate::stats::{pairwise_sum, KsLevel, GATE_Z};
use crate::wiener::sample_wiener;

/// Sample size, seed and parallelism shared by every experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub n: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub z: f64,
}

impl McOptions {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            threads: None,
            z: GATE_Z,
        }
    }

    pub fn threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn stream(&self, i: u64) -> RngStream {
        RngStream::new(self.seed, i)
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n_paths", "must be >= 1"));
        }
        if !(self.z > 0.0) {
            return Err(invalid("z", format!("must be > 0, got {}", self.z)));
        }
        Ok(())
    }

    fn meta(&self, dt: Option<f64>, started: Instant) -> RunMeta {
        RunMeta {
            seed: self.seed,
            n: self.n,
            dt,
            wall_time_s: started.elapsed().as_secs_f64(),
            censored: 0,
            notes: Vec::new(),
        }
    }
}

const MAX_DOUBLINGS: u32 = 10;
const MAX_CENSORED_FRACTION: f64 = 1e-3;

struct ExitSample {
    barrier: Option<Barrier>,
    steps: u64,
}

/// Exit of Euler paths of `a_ε` from `(lower, upper)`. The horizon starts at
/// `t0` and doubles (continuing the same paths) until at most 0.1% remain
/// undecided. Returns `(lower exits, decided paths, censored paths)`.
#[allow(clippy::too_many_arguments)]
fn exit_split(
    drift: &ScaledDrift,
    x0: f64,
    lower: f64,
    upper: f64,
    dt: f64,
    t0: f64,
    opts: &McOptions,
) -> Result<(usize, usize, usize)> {
    let base = (t0 / dt).ceil().max(1.0) as u64;
    let max_steps = base << MAX_DOUBLINGS;
    let samples = par_map(opts.n, opts.threads, |i| {
        let mut e = BridgedExit::new(x0, lower, upper, dt, |x| drift.eval(x), opts.stream(i));
        let barrier = e.run_until(max_steps);
        ExitSample {
            barrier,
            steps: e.steps(),
        }
    })?;
    let allowed = (MAX_CENSORED_FRACTION * opts.n as f64).floor() as usize;
    for k in 0..=MAX_DOUBLINGS {
        let horizon = base << k;
        let censored = samples
            .iter()
            .filter(|s| s.barrier.is_none() || s.steps > horizon)
            .count();
        if censored <= allowed {
            let low = samples
                .iter()
                .filter(|s| s.steps <= horizon && s.barrier == Some(Barrier::Lower))
                .count();
            return Ok((low, opts.n - censored, censored));
        }
        if k == MAX_DOUBLINGS {
            return Err(Error::Censored {
                censored,
                total: opts.n,
                doublings: MAX_DOUBLINGS,
            });
        }
    }
    unreachable!()
}

fn resolve_dt(dt: Option<f64>, epsilon: f64) -> Result<(f64, Vec<String>)> {
    let dt = dt.unwrap_or_else(|| recommended_dt(epsilon));
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("must be > 0, got {dt}")));
    }
    Ok((dt, dt_policy_warning(dt, epsilon).into_iter().collect()))
}

fn check_eps(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("must be > 0, got {epsilon}")));
    }
    Ok(())
}

/// Fraction of Euler paths of `X_ε` from `ε` that reach `-ε` before `2ε`.
/// `dt` defaults to `ε²/25`.
pub fn estimate_hitting_prob(
    d: &DriftSpec,
    l: f64,
    epsilon: f64,
    opts: &McOptions,
    dt: Option<f64>,
) -> Result<McReport> {
    opts.check()?;
    check_eps(epsilon)?;
    let started = Instant::now();
    let (dt, notes) = resolve_dt(dt, epsilon)?;
    let drift = d.scaled(l, epsilon);
    let (low, decided, censored) = exit_split(
        &drift,
        epsilon,
        -epsilon,
        2.0 * epsilon,
        dt,
        64.0 * epsilon * epsilon,
        opts,
    )?;
    let mut meta = opts.meta(Some(dt), started);
    meta.censored = censored;
    meta.notes = notes;
    let mut r = McReport::proportion("p_hit_lower", low, decided, opts.z).with_meta(meta);
    r.meta.n = decided;
    Ok(r)
}

/// `P(reach -2ε before 2ε | X_ε(0) = 0)` by simulation, gated against the
/// `ε → 0` limit with the finite-`ε` scale-function correction as slack.
pub fn crossing_split_mc(
    d: &DriftSpec,
    l: f64,
    epsilon: f64,
    opts: &McOptions,
    dt: Option<f64>,
) -> Result<McReport> {
    opts.check()?;
    check_eps(epsilon)?;
    let started = Instant::now();
    let (dt, notes) = resolve_dt(dt, epsilon)?;
    let drift = d.scaled(l, epsilon);
    let (low, decided, censored) = exit_split(
        &drift,
        0.0,
        -2.0 * epsilon,
        2.0 * epsilon,
        dt,
        64.0 * epsilon * epsilon,
        opts,
    )?;
    let limit = crossing_split_limit(d);
    let exact = crossing_split_exact(d, l)?;
    let mut meta = opts.meta(Some(dt), started);
    meta.censored = censored;
    meta.notes = notes;
    meta.notes
        .push(format!("finite-eps split {exact:.6}, limit {limit:.6}"));
    let mut r = McReport::proportion("split_lower_first", low, decided, opts.z)
        .against(limit, opts.z, (exact - limit).abs())
        .with_meta(meta);
    r.meta.n = decided;
    Ok(r)
}

/// Tail weight below which the Laplace transform is truncated.
const ZETA_TAIL: f64 = 1e-10;

/// Mean of `exp(-θ ζ)`, with `ζ` the first time the local time at 0 of
/// reflected Brownian motion from 0 exceeds an independent `Exp(α)` level,
/// against `α / (α + √(2θ))`. `ζ` is resolved on a grid of step `dt`.
pub fn zeta_laplace_check(alpha: f64, theta: f64, opts: &McOptions, dt: f64) -> Result<McReport> {
    opts.check()?;
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(invalid("theta", format!("must be > 0, got {theta}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid(
            "alpha",
            format!("must be finite and >= 0, got {alpha}"),
        ));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("must be > 0, got {dt}")));
    }
    let started = Instant::now();
    let horizon = -ZETA_TAIL.ln() / theta;
    let sampler = PassageSampler::new(dt, 10);
    let draws = par_map(opts.n, opts.threads, |i| {
        if alpha == 0.0 {
            return (0.0, false);
        }
        let s = opts.stream(i);
        let level = s.rng(Channel::Aux).exponential(alpha);
        // from 0 the local time is the running maximum of -w
        match sampler.first_passage_below(0.0, -level, horizon, s) {
            Some(zeta) => ((-theta * zeta).exp(), false),
            None => (0.5 * ZETA_TAIL, true),
        }
    })?;
    let values: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let target = alpha / (alpha + (2.0 * theta).sqrt());
    let mut meta = opts.meta(Some(dt), started);
    meta.censored = draws.iter().filter(|d| d.1).count();
    Ok(McReport::mean("laplace_zeta", &values, opts.z)?
        .against(target, opts.z, 0.0)
        .with_meta(meta))
}

/// Regression through the origin of the flip count on the total local time
/// across hard-membrane paths with `α^+ = α^- = alpha`; the slope should be
/// `alpha`. `alpha = 0` disables the membrane (no flips).
pub fn flip_count_check(
    alpha: f64,
    grid: &TimeGrid,
    x0: f64,
    opts: &McOptions,
) -> Result<McReport> {
    opts.check()?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid(
            "alpha",
            format!("must be finite and >= 0, got {alpha}"),
        ));
    }
    let started = Instant::now();
    let sign = if x0 < 0.0 { -1 } else { 1 };
    let params = if alpha > 0.0 {
        Some(HardMembraneParams::new(alpha, alpha, sign)?)
    } else {
        None
    };
    let side = Side::from_sign(sign).expect("sign is +-1");
    let pairs = par_map(opts.n, opts.threads, |i| -> Result<(f64, f64)> {
        let s = opts.stream(i);
        match params {
            Some(p) => {
                let hm = sample_hard_membrane(grid, x0, p, s)?;
                Ok((hm.flip_times.len() as f64, hm.local_time.last()))
            }
            None => Ok((0.0, sample_reflected_bm(grid, x0, side, s).1.last())),
        }
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let sxy = pairwise_sum(&pairs.iter().map(|(n, l)| n * l).collect::<Vec<_>>());
    let sxx = pairwise_sum(&pairs.iter().map(|(_, l)| l * l).collect::<Vec<_>>());
    let (slope, se) = if sxx > 0.0 {
        let slope = sxy / sxx;
        let meat = pairwise_sum(
            &pairs
                .iter()
                .map(|(n, l)| {
                    let r = n - slope * l;
                    l * l * r * r
                })
                .collect::<Vec<_>>(),
        );
        (slope, meat.sqrt() / sxx)
    } else {
        (0.0, 0.0)
    };
    let mean_flips = pairwise_sum(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()) / opts.n as f64;
    let mut meta = opts.meta(Some(grid.dt()), started);
    meta.notes.push(format!("mean flip count {mean_flips:.6}"));
    Ok(McReport::with_stderr("flip_slope", slope, se, opts.z)
        .against(alpha, opts.z, 0.0)
        .with_meta(meta))
}

/// Counts paths of `X_ε` violating
/// `ω_X(δ) <= 2ε + 2 ω_w(δ) + 4 √(dt ln(1/dt))` for any `δ` in `deltas`.
pub fn modulus_bound_check(
    d: &DriftSpec,
    l: f64,
    epsilon: f64,
    grid: &TimeGrid,
    x0: f64,
    deltas: &[f64],
    opts: &McOptions,
) -> Result<McReport> {
    opts.check()?;
    check_eps(epsilon)?;
    let started = Instant::now();
    let drift = d.scaled(l, epsilon);
    let dt = grid.dt();
    let slack = 4.0 * (dt * (1.0 / dt).ln()).sqrt();
    let results = par_map(opts.n, opts.threads, |i| -> Result<(usize, f64)> {
        let s = opts.stream(i);
        let x = euler_sde(grid, x0, |v| drift.eval(v), s);
        let w = sample_wiener(grid, x0, s);
        let mut bad = 0;
        let mut worst = f64::NEG_INFINITY;
        for &delta in deltas {
            let gap = modulus_of_continuity(&x, delta)?
                - (2.0 * epsilon + 2.0 * modulus_of_continuity(&w, delta)? + slack);
            worst = worst.max(gap);
            if gap > 0.0 {
                bad += 1;
            }
        }
        Ok((bad, worst))
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let violations = results.iter().filter(|r| r.0 > 0).count();
    let worst = results
        .iter()
        .map(|r| r.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut meta = opts.meta(Some(dt), started);
    meta.notes.push(format!(
        "largest margin used {worst:.6} (negative = inside bound)"
    ));
    Ok(McReport::value("modulus_violations", violations as f64)
        .gated(violations as f64, 0.0)
        .with_meta(meta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub epsilons: Vec<f64>,
    pub reports: Vec<McReport>,
    /// KS distances strictly decrease along `epsilons`.
    pub decreasing: bool,
}

impl ConvergenceReport {
    pub fn distances(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.estimate).collect()
    }

    pub fn last_distance(&self) -> Option<f64> {
        self.reports.last().map(|r| r.estimate)
    }
}

/// Two-sample KS distance between `N` draws of `sample_a(ε, ·)` and `N`
/// draws of `sample_b(·)` for each `ε`. The `B` sample is drawn once under
/// a derived seed; the `A` samples reuse the same stream indices for every
/// `ε`.
pub fn marginal_convergence<A, B>(
    sample_a: A,
    sample_b: B,
    eps_list: &[f64],
    opts: &McOptions,
    level: KsLevel,
) -> Result<ConvergenceReport>
where
    A: Fn(f64, RngStream) -> Result<f64> + Sync + Send,
    B: Fn(RngStream) -> Result<f64> + Sync + Send,
{
    opts.check()?;
    if eps_list.is_empty() {
        return Err(invalid("epsilons", "need at least one value"));
    }
    let b: Vec<f64> = par_map(opts.n, opts.threads, |i| {
        sample_b(opts.stream(i).derive(0x5EED_B))
    })?
    .into_iter()
    .collect::<Result<_>>()?;
    let mut reports = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let started = Instant::now();
        let a: Vec<f64> = par_map(opts.n, opts.threads, |i| sample_a(eps, opts.stream(i)))?
            .into_iter()
            .collect::<Result<_>>()?;
        let mut r = ks_two_sample_report(&a, &b, level)?;
        r.metric = format!("ks2_eps_{eps}");
        let mut meta = opts.meta(None, started);
        meta.notes.push(format!("epsilon {eps}"));
        r.meta = meta;
        reports.push(r);
    }
    let decreasing = reports.windows(2).all(|w| w[1].estimate < w[0].estimate);
    Ok(ConvergenceReport {
        epsilons: eps_list.to_vec(),
        reports,
        decreasing,
    })
}
