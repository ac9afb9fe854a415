//! Named experiments for `verify`. Each preset fixes a default configuration
//! and maps it onto the Monte Carlo operations of the core crate.

use std::str::FromStr;

use membrane::drift::{hitting_prob_analytic, DriftFamily, DriftSpec};
use membrane::montecarlo::samplers::{
    euler_terminal, hard_membrane_terminal, killed_euler_terminal, killed_ladder_marginal,
    killed_reflected_marginal, reflected_terminal,
};
use membrane::montecarlo::{
    crossing_split_mc, flip_count_check, marginal_convergence, modulus_bound_check,
    zeta_laplace_check, ConvergenceReport, ExperimentConfig, LMode, McReport,
};
use membrane::processes::{dt_policy_warning, recommended_dt, HardMembraneParams};
use membrane::Side;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    KilledLadder,
    KilledConvergence,
    Calibration,
    HardMembrane,
    Split,
    Reflection,
    Modulus,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::KilledLadder,
        Preset::KilledConvergence,
        Preset::Calibration,
        Preset::HardMembrane,
        Preset::Split,
        Preset::Reflection,
        Preset::Modulus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::KilledLadder => "thm1-killed-ladder",
            Preset::KilledConvergence => "thm2-convergence",
            Preset::Calibration => "thm3-calibration",
            Preset::HardMembrane => "thm4-hardmembrane",
            Preset::Split => "eq28-split",
            Preset::Reflection => "rem6-reflection",
            Preset::Modulus => "lemma3-modulus",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::KilledLadder => {
                "killed ladder vs killed reflected BM; Laplace transform of the killing time"
            }
            Preset::KilledConvergence => {
                "X_eps stopped at -eps vs reflected BM killed at an exponential local time"
            }
            Preset::Calibration => {
                "calibrated hitting ratio eps^-1 p+ / alpha by quadrature (step drift)"
            }
            Preset::HardMembrane => "X_eps vs the hard membrane; flip count vs local time",
            Preset::Split => "exit split from 0 through (-2 eps, 2 eps)",
            Preset::Reflection => "inflated drift strength vs reflected BM",
            Preset::Modulus => "modulus-of-continuity bound on Euler paths",
        }
    }

    pub fn defaults(self) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.seed = 1;
        c.n_paths = 10_000;
        c.process.x0 = 1.0;
        c.grid.horizon = 1.0;
        c.grid.n_steps = 10_000;
        c.experiment.t = 1.0;
        c.experiment.epsilons = vec![0.2, 0.1, 0.05];
        match self {
            Preset::KilledLadder => {
                c.process.x0 = 0.3;
                c.experiment.t = 0.5;
                c.grid.horizon = 0.5;
                c.experiment.theta = 0.5;
                c.experiment.dt = Some(1e-5);
            }
            Preset::KilledConvergence | Preset::HardMembrane => {}
            Preset::Calibration => {
                c.n_paths = 1;
                c.experiment.epsilons = vec![1e-4, 1e-6, 1e-8, 1e-10, 1e-12];
            }
            Preset::Split => {
                c.n_paths = 100_000;
                c.drift.family = DriftFamily::Signpower {
                    lambda: 1.0,
                    c_plus: 1.0,
                    c_minus: 4.0,
                };
                c.experiment.epsilon = 0.05;
                c.experiment.dt = Some(0.05 * 0.05 / 6400.0);
            }
            Preset::Reflection => {
                c.calibration.mode = LMode::Reflecting;
                c.calibration.delta = 1.0;
            }
            Preset::Modulus => {
                c.n_paths = 1000;
                c.process.x0 = 0.0;
                c.experiment.epsilon = 0.1;
                c.grid.n_steps = 2500;
                c.experiment.deltas = vec![0.01, 0.1];
            }
        }
        c
    }

    pub fn run(self, cfg: &ExperimentConfig) -> Result<Run, CliError> {
        cfg.validate()?;
        let d = cfg.drift_spec()?;
        let mut run = Run::default();
        match self {
            Preset::KilledLadder => killed_ladder(cfg, &mut run)?,
            Preset::KilledConvergence => {
                let grid = cfg.time_grid()?;
                let alpha = cfg.calibration.alpha;
                let (x0, t) = (cfg.process.x0, cfg.experiment.t);
                convergence(
                    cfg,
                    &d,
                    &mut run,
                    false,
                    |eps, l, dt, s| killed_euler_terminal(&d.scaled(l, eps), x0, eps, dt, t, s),
                    |s| Ok(killed_reflected_marginal(&grid, x0, alpha, t, s)),
                )?
            }
            Preset::Calibration => calibration(cfg, &d, &mut run)?,
            Preset::HardMembrane => {
                let grid = cfg.time_grid()?;
                let alpha = cfg.calibration.alpha;
                let x0 = cfg.process.x0;
                let sign = if x0 < 0.0 { -1 } else { 1 };
                let params = HardMembraneParams::new(alpha, alpha, sign)?;
                let t = cfg.experiment.t;
                convergence(
                    cfg,
                    &d,
                    &mut run,
                    true,
                    |eps, l, dt, s| euler_terminal(&d.scaled(l, eps), x0, dt, t, s),
                    |s| hard_membrane_terminal(&grid, x0, params, s),
                )?;
                run.gate(flip_count_check(alpha, &grid, x0, &cfg.options())?);
            }
            Preset::Split => {
                let eps = cfg.experiment.epsilon;
                let l = cfg.strength(&d, eps)?;
                run.warn(cfg.experiment.dt, eps);
                run.gate(crossing_split_mc(
                    &d,
                    l,
                    eps,
                    &cfg.options(),
                    cfg.experiment.dt,
                )?);
            }
            Preset::Reflection => {
                let grid = cfg.time_grid()?;
                let (x0, t) = (cfg.process.x0, cfg.experiment.t);
                convergence(
                    cfg,
                    &d,
                    &mut run,
                    false,
                    |eps, l, dt, s| euler_terminal(&d.scaled(l, eps), x0, dt, t, s),
                    |s| Ok(reflected_terminal(&grid, x0, s)),
                )?
            }
            Preset::Modulus => {
                let eps = cfg.experiment.epsilon;
                let grid = cfg.time_grid()?;
                run.warn(Some(grid.dt()), eps);
                let l = cfg.strength(&d, eps)?;
                run.gate(modulus_bound_check(
                    &d,
                    l,
                    eps,
                    &grid,
                    cfg.process.x0,
                    &cfg.experiment.deltas,
                    &cfg.options(),
                )?);
            }
        }
        Ok(run)
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                CliError::Validation(format!(
                    "unknown preset `{s}`, expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Report rows of one preset. Only gate rows decide the exit status; the
/// other rows are diagnostics whose own `pass` column is informational.
#[derive(Debug, Clone, Default)]
pub struct Run {
    pub rows: Vec<McReport>,
    pub gates: Vec<bool>,
    pub warnings: Vec<String>,
}

impl Run {
    fn info(&mut self, r: McReport) {
        self.rows.push(r);
        self.gates.push(false);
    }

    fn gate(&mut self, r: McReport) {
        self.rows.push(r);
        self.gates.push(true);
    }

    fn warn(&mut self, dt: Option<f64>, eps: f64) {
        if let Some(w) = dt.and_then(|dt| dt_policy_warning(dt, eps)) {
            self.warnings.push(w);
        }
    }

    pub fn pass(&self) -> bool {
        self.rows
            .iter()
            .zip(&self.gates)
            .all(|(r, &g)| !g || r.pass)
    }
}

fn trend_row(rep: &ConvergenceReport, bound: Option<f64>) -> McReport {
    let last = rep.last_distance().unwrap_or(f64::NAN);
    let mut r = McReport::value("ks2_trend", last);
    r.statistic = Some(last);
    r.critical = bound;
    r.pass = rep.decreasing && bound.is_none_or(|b| last < b);
    r.meta
        .notes
        .push(format!("distances {:?}", rep.distances()));
    r
}

/// Two-sample KS distances of `sample_x(ε, L_ε, dt_ε)` against `reference`
/// over the configured ε list, gated on a decreasing trend and, with
/// `bounded`, a final distance below 0.02.
fn convergence<A, B>(
    cfg: &ExperimentConfig,
    d: &DriftSpec,
    run: &mut Run,
    bounded: bool,
    sample_x: A,
    reference: B,
) -> Result<(), CliError>
where
    A: Fn(f64, f64, f64, membrane::RngStream) -> membrane::Result<f64> + Sync + Send,
    B: Fn(membrane::RngStream) -> membrane::Result<f64> + Sync + Send,
{
    let eps_list = &cfg.experiment.epsilons;
    let mut strengths = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        strengths.push(cfg.strength(d, eps)?);
        run.warn(cfg.experiment.dt, eps);
    }
    let dt_for = |eps: f64| cfg.experiment.dt.unwrap_or_else(|| recommended_dt(eps));
    let lookup = |eps: f64| {
        strengths[eps_list
            .iter()
            .position(|&e| e == eps)
            .expect("listed epsilon")]
    };
    let rep = marginal_convergence(
        |eps, s| sample_x(eps, lookup(eps), dt_for(eps), s),
        reference,
        eps_list,
        &cfg.options(),
        cfg.tolerance.ks_level,
    )?;
    for r in &rep.reports {
        run.info(r.clone());
    }
    run.gate(trend_row(&rep, bounded.then_some(0.02)));
    Ok(())
}

fn killed_ladder(cfg: &ExperimentConfig, run: &mut Run) -> Result<(), CliError> {
    let grid = cfg.time_grid()?;
    let (x0, t, alpha) = (cfg.process.x0, cfg.experiment.t, cfg.calibration.alpha);
    let rep = marginal_convergence(
        |eps, s| killed_ladder_marginal(&grid, x0, eps, alpha, t, s),
        |s| Ok(killed_reflected_marginal(&grid, x0, alpha, t, s)),
        &cfg.experiment.epsilons,
        &cfg.options(),
        cfg.tolerance.ks_level,
    )?;
    for r in &rep.reports {
        run.info(r.clone());
    }
    run.gate(trend_row(&rep, None));
    let dt = cfg.experiment.dt.unwrap_or(1e-5);
    run.gate(zeta_laplace_check(
        alpha,
        cfg.experiment.theta,
        &cfg.options(),
        dt,
    )?);
    Ok(())
}

fn calibration(cfg: &ExperimentConfig, d: &DriftSpec, run: &mut Run) -> Result<(), CliError> {
    let alpha = cfg.calibration.alpha;
    let mut ratios = Vec::new();
    for &eps in &cfg.experiment.epsilons {
        let l = cfg.strength(d, eps)?;
        let ratio = hitting_prob_analytic(d, l, eps, Side::Positive)? / (eps * alpha);
        let le = (1.0 / eps).ln();
        let reference = 1.0 + (le.ln() - std::f64::consts::LN_2) / le;
        let mut r = McReport::value(format!("ratio_eps_{eps:e}"), ratio)
            .gated((ratio / reference - 1.0).abs(), 1e-2);
        r.meta.notes.push(format!("L {l}"));
        run.info(r);
        ratios.push(ratio);
    }
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let close = run.rows.iter().all(|r| r.pass);
    let mut r = McReport::value("ratio_trend", ratios.last().copied().unwrap_or(f64::NAN));
    r.pass = decreasing && close;
    run.gate(r);
    Ok(())
}
