//! Command-line front end for the `membrane` crate: path sampling,
//! calibration tables, hitting-probability estimates and named verification
//! presets, with CSV output and a JSON run manifest.

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use membrane::drift::{calibrate_l, hitting_prob_analytic, CalibrationMode};
use membrane::montecarlo::{estimate_hitting_prob, ExperimentConfig, McReport, ProcessKind};
use membrane::processes::{
    dt_policy_warning, euler_sde, sample_hard_membrane, sample_killed_ladder, sample_reflected_bm,
    sample_skew_bm, HardMembraneParams, SkewParams,
};
use membrane::{sample_wiener, Side};

pub use config::{load_config, ConfigError};
pub use error::{exit_code, CliError, Outcome};
pub use manifest::RunManifest;
pub use presets::Preset;

use output::{float, numbered, path_csv, report_csv, write_file, PathColumns};

#[derive(Debug, Parser)]
#[command(
    name = "membrane",
    version,
    about = "Brownian motion with a hard membrane: sampling and verification"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "MEMBRANE_THREADS")]
    pub threads: Option<usize>,
    /// Output CSV; a `.manifest.json` is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set grid.n_steps=500`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample paths of a process and write them as CSV.
    Sample {
        /// wiener, reflected, skew, hard_membrane, euler or killed_ladder.
        #[arg(long)]
        process: Option<String>,
        #[arg(long)]
        paths: Option<usize>,
    },
    /// Print `epsilon,L,analytic_ratio` for the calibrated drift strength.
    Calibrate {
        #[arg(long)]
        alpha: Option<f64>,
        /// Comma-separated list.
        #[arg(long, value_delimiter = ',')]
        epsilons: Vec<f64>,
    },
    /// Estimate P(reach -eps before 2 eps | X(0) = eps) and compare with quadrature.
    Hitprob {
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run a named verification preset.
    Verify {
        /// Preset name; `list` prints the available presets.
        preset: String,
    },
}

/// Base configuration, then the config file, then `--set`, then flags.
pub fn resolve_config(
    base: ExperimentConfig,
    common: &Common,
) -> Result<ExperimentConfig, CliError> {
    let mut cfg = base;
    if let Some(path) = &common.config {
        let entries = config::read_entries(path)?;
        config::apply(&mut cfg, &entries)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    }
    let overrides = common
        .overrides
        .iter()
        .map(|s| config::parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    config::apply(&mut cfg, &overrides)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(t) = common.threads {
        cfg.threads = Some(t);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a parsed command. Human-readable text goes to `log`; CSV goes to
/// `--out` or, without it, to `stdout`.
pub fn run(
    cli: &Cli,
    stdout: &mut dyn std::io::Write,
    log: &mut dyn std::io::Write,
) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Sample { process, paths } => {
            let mut cfg = resolve_config(ExperimentConfig::default(), &cli.common)?;
            if let Some(p) = process {
                cfg.process.kind = p.parse::<ProcessKind>()?;
            }
            if let Some(n) = paths {
                cfg.n_paths = *n;
            }
            cfg.validate()?;
            cmd_sample(&cfg, cli.common.out.as_deref(), stdout, log)
        }
        Command::Calibrate { alpha, epsilons } => {
            let mut cfg = resolve_config(ExperimentConfig::default(), &cli.common)?;
            if let Some(a) = alpha {
                cfg.calibration.alpha = *a;
            }
            if !epsilons.is_empty() {
                cfg.experiment.epsilons = epsilons.clone();
            }
            cmd_calibrate(&cfg, cli.common.out.as_deref(), stdout)
        }
        Command::Hitprob { epsilon } => {
            let mut cfg = resolve_config(ExperimentConfig::default(), &cli.common)?;
            if let Some(e) = epsilon {
                cfg.experiment.epsilon = *e;
            }
            cmd_hitprob(&cfg, cli.common.out.as_deref(), stdout, log)
        }
        Command::Verify { preset } => {
            if preset == "list" {
                for p in Preset::ALL {
                    let _ = writeln!(stdout, "{:<20} {}", p.name(), p.description());
                }
                return Ok(Outcome::Pass);
            }
            let p: Preset = preset.parse()?;
            let cfg = resolve_config(p.defaults(), &cli.common)?;
            cmd_verify(p, &cfg, cli.common.out.as_deref(), stdout, log)
        }
    }
}

fn emit(
    name: &str,
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    csv: &str,
    stdout: &mut dyn std::io::Write,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_file(path, csv)?;
            let m = RunManifest::new(name, cfg.clone(), vec![path.display().to_string()]);
            write_file(&output::manifest_path(path), &m.to_json())
        }
        None => stdout
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

pub fn cmd_sample(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    stdout: &mut dyn std::io::Write,
    log: &mut dyn std::io::Write,
) -> Result<Outcome, CliError> {
    let grid = cfg.time_grid()?;
    let p = &cfg.process;
    let n = cfg.n_paths;
    if n > 1 && out.is_none() {
        return Err(CliError::Validation("n_paths > 1 requires --out".into()));
    }
    // validate parameters before sampling anything
    match p.kind {
        ProcessKind::Skew => {
            SkewParams::new(p.gamma)?;
        }
        ProcessKind::HardMembrane => {
            HardMembraneParams::new(p.alpha_plus, p.alpha_minus, p.initial_sign)?;
        }
        ProcessKind::Euler => {
            if let Some(w) = dt_policy_warning(grid.dt(), p.epsilon) {
                let _ = writeln!(log, "warning: {w}");
            }
        }
        _ => {}
    }
    let d = cfg.drift_spec()?;
    let times: Vec<f64> = grid.times().collect();
    let mut files = Vec::new();
    for i in 0..n {
        let s = cfg.options().stream(i as u64);
        let csv = match p.kind {
            ProcessKind::Wiener => {
                let w = sample_wiener(&grid, p.x0, s);
                path_csv(&PathColumns {
                    t: times.clone(),
                    value: w.values(),
                    ..Default::default()
                })
            }
            ProcessKind::Reflected => {
                let (g, l) = sample_reflected_bm(&grid, p.x0, p.side, s);
                path_csv(&PathColumns {
                    t: times.clone(),
                    value: g.values(),
                    local_time: Some(l.values()),
                    sign: None,
                })
            }
            ProcessKind::Skew => {
                let x = sample_skew_bm(&grid, p.x0, SkewParams::new(p.gamma)?, s);
                path_csv(&PathColumns {
                    t: times.clone(),
                    value: x.values(),
                    ..Default::default()
                })
            }
            ProcessKind::HardMembrane => {
                let params = HardMembraneParams::new(p.alpha_plus, p.alpha_minus, p.initial_sign)?;
                let hm = sample_hard_membrane(&grid, p.x0, params, s)?;
                path_csv(&PathColumns {
                    t: times.clone(),
                    value: hm.path.values(),
                    local_time: Some(hm.local_time.values()),
                    sign: Some((0..grid.len()).map(|k| hm.sign_at(k)).collect()),
                })
            }
            ProcessKind::Euler => {
                let l = cfg.strength(&d, p.epsilon)?;
                let drift = d.scaled(l, p.epsilon);
                let x = euler_sde(&grid, p.x0, drift.as_fn(), s);
                path_csv(&PathColumns {
                    t: times.clone(),
                    value: x.values(),
                    ..Default::default()
                })
            }
            ProcessKind::KilledLadder => {
                let kl = sample_killed_ladder(&grid, p.x0, p.epsilon, p.p_hit, s)?;
                // rows stop at the killing time
                let end = kl.stopped_index(grid.horizon()) + 1;
                let local: Vec<f64> = kl.ladder.n_tilde[..end]
                    .iter()
                    .map(|&k| k as f64 * p.epsilon)
                    .collect();
                path_csv(&PathColumns {
                    t: times[..end].to_vec(),
                    value: &kl.ladder.x_tilde.values()[..end],
                    local_time: Some(&local),
                    sign: None,
                })
            }
        };
        match out {
            Some(o) => {
                let path = numbered(o, i, n);
                write_file(&path, &csv)?;
                files.push(path.display().to_string());
            }
            None => stdout
                .write_all(csv.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?,
        }
    }
    if let Some(o) = out {
        let m = RunManifest::new("sample", cfg.clone(), files);
        write_file(&output::manifest_path(&numbered(o, 0, 1)), &m.to_json())?;
        let _ = writeln!(
            log,
            "wrote {n} {} path(s) to {}",
            p.kind.name(),
            o.display()
        );
    }
    Ok(Outcome::Pass)
}

pub fn cmd_calibrate(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    stdout: &mut dyn std::io::Write,
) -> Result<Outcome, CliError> {
    let d = cfg.drift_spec()?;
    let alpha = cfg.calibration.alpha;
    if cfg.experiment.epsilons.is_empty() {
        return Err(CliError::Validation(
            "experiment.epsilons must not be empty".into(),
        ));
    }
    let mut table = String::from("epsilon,L,analytic_ratio\n");
    for &eps in &cfg.experiment.epsilons {
        let l = calibrate_l(&d, alpha, eps, CalibrationMode::TwoSided)?.l_epsilon;
        let ratio = hitting_prob_analytic(&d, l, eps, Side::Positive)? / (eps * alpha);
        table.push_str(&format!("{},{},{}\n", float(eps), float(l), float(ratio)));
    }
    stdout
        .write_all(table.as_bytes())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    if let Some(path) = out {
        write_file(path, &table)?;
        let m = RunManifest::new("calibrate", cfg.clone(), vec![path.display().to_string()]);
        write_file(&output::manifest_path(path), &m.to_json())?;
    }
    Ok(Outcome::Pass)
}

pub fn cmd_hitprob(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    stdout: &mut dyn std::io::Write,
    log: &mut dyn std::io::Write,
) -> Result<Outcome, CliError> {
    let d = cfg.drift_spec()?;
    let eps = cfg.experiment.epsilon;
    let l = cfg.strength(&d, eps)?;
    if let Some(w) = cfg.experiment.dt.and_then(|dt| dt_policy_warning(dt, eps)) {
        let _ = writeln!(log, "warning: {w}");
    }
    let exact = hitting_prob_analytic(&d, l, eps, Side::Positive)?;
    let mc = estimate_hitting_prob(&d, l, eps, &cfg.options(), cfg.experiment.dt)?.against(
        exact,
        cfg.tolerance.z,
        0.0,
    );
    let rows = [mc, McReport::value("p_hit_analytic", exact)];
    summary(log, "hitprob", &rows, &[true, false], &[]);
    emit("hitprob", cfg, out, &report_csv(&rows), stdout)?;
    Ok(Outcome::from_pass(rows[0].pass))
}

pub fn cmd_verify(
    preset: Preset,
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    stdout: &mut dyn std::io::Write,
    log: &mut dyn std::io::Write,
) -> Result<Outcome, CliError> {
    let run = preset.run(cfg)?;
    summary(log, preset.name(), &run.rows, &run.gates, &run.warnings);
    emit(preset.name(), cfg, out, &report_csv(&run.rows), stdout)?;
    Ok(Outcome::from_pass(run.pass()))
}

fn summary(
    log: &mut dyn std::io::Write,
    name: &str,
    rows: &[McReport],
    gates: &[bool],
    warnings: &[String],
) {
    for w in warnings {
        let _ = writeln!(log, "warning: {w}");
    }
    let _ = writeln!(log, "{name}");
    let mut all = true;
    for (r, &g) in rows.iter().zip(gates) {
        let verdict = match (g, r.pass) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, _) => "info",
        };
        all &= !g || r.pass;
        let num = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(
            log,
            "  {verdict:<4}  {:<28} estimate {:<12} statistic {:<10} critical {}",
            r.metric,
            format!("{:.6}", r.estimate),
            num(r.statistic),
            num(r.critical)
        );
        for n in &r.meta.notes {
            let _ = writeln!(log, "        {n}");
        }
    }
    let _ = writeln!(
        log,
        "{}",
        if all {
            "all gates passed"
        } else {
            "gate failure"
        }
    );
}
