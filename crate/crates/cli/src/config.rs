//! Flat `key = value` configuration files.
//!
//! ```text
//! # comment
//! seed = 3
//! grid.n_steps = 1000
//! drift.family = signpower
//! drift.c_minus = 4
//! experiment.epsilons = 0.2, 0.1, 0.05
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use membrane::drift::DriftFamily;
use membrane::montecarlo::{ExperimentConfig, LMode, ProcessKind};
use membrane::stats::KsLevel;
use membrane::Side;

use crate::error::CliError;

pub const KEYS: &[&str] = &[
    "seed",
    "n_paths",
    "threads",
    "grid.horizon",
    "grid.n_steps",
    "process.kind",
    "process.x0",
    "process.side",
    "process.gamma",
    "process.alpha_plus",
    "process.alpha_minus",
    "process.initial_sign",
    "process.epsilon",
    "process.p_hit",
    "drift.family",
    "drift.lambda",
    "drift.c_plus",
    "drift.c_minus",
    "calibration.mode",
    "calibration.alpha",
    "calibration.beta",
    "calibration.delta",
    "calibration.l",
    "experiment.epsilon",
    "experiment.epsilons",
    "experiment.theta",
    "experiment.t",
    "experiment.dt",
    "experiment.deltas",
    "tolerance.z",
    "tolerance.ks_level",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line in the source, if the error came from a file.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// One `key = value` assignment and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: Option<usize>,
}

pub fn nearest_key(key: &str) -> &'static str {
    KEYS.iter()
        .copied()
        .min_by_key(|k| strsim::levenshtein(k, key))
        .expect("key table is not empty")
}

fn check_key(key: &str, line: Option<usize>) -> Result<(), ConfigError> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ConfigError {
            line,
            message: format!("unknown key `{key}` (did you mean `{}`?)", nearest_key(key)),
        })
    }
}

pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = Some(i + 1);
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| ConfigError {
            line,
            message: format!("expected `key = value`, found `{body}`"),
        })?;
        let key = k.trim().to_string();
        check_key(&key, line)?;
        if out.iter().any(|e: &Entry| e.key == key) {
            return Err(ConfigError {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        out.push(Entry {
            key,
            value: v.trim().to_string(),
            line,
        });
    }
    Ok(out)
}

/// Parse a `key=value` override given on the command line.
pub fn parse_override(s: &str) -> Result<Entry, ConfigError> {
    let (k, v) = s.split_once('=').ok_or_else(|| ConfigError {
        line: None,
        message: format!("override `{s}` is not of the form key=value"),
    })?;
    let key = k.trim().to_string();
    check_key(&key, None)?;
    Ok(Entry {
        key,
        value: v.trim().to_string(),
        line: None,
    })
}

/// Entries of a config file; parse errors name the file and line.
pub fn read_entries(path: &Path) -> Result<Vec<Entry>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_entries(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Default configuration overridden by the file at `path`.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    apply(&mut cfg, &read_entries(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

fn parse<T: FromStr>(e: &Entry, what: &str) -> Result<T, ConfigError> {
    e.value.parse().map_err(|_| ConfigError {
        line: e.line,
        message: format!("`{}` expects {what}, got `{}`", e.key, e.value),
    })
}

fn parse_list(e: &Entry) -> Result<Vec<f64>, ConfigError> {
    e.value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| ConfigError {
                line: e.line,
                message: format!(
                    "`{}` expects a comma-separated list of numbers, got `{}`",
                    e.key, e.value
                ),
            })
        })
        .collect()
}

fn named<T>(e: &Entry, options: &[(&str, T)]) -> Result<T, ConfigError>
where
    T: Copy,
{
    let v = e.value.to_ascii_lowercase().replace('-', "_");
    options
        .iter()
        .find(|(n, _)| *n == v)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
            ConfigError {
                line: e.line,
                message: format!(
                    "`{}` expects one of {}, got `{}`",
                    e.key,
                    names.join(", "),
                    e.value
                ),
            }
        })
}

fn signpower_field(cfg: &mut ExperimentConfig, e: &Entry) -> Result<(), ConfigError> {
    let x: f64 = parse(e, "a number")?;
    match &mut cfg.drift.family {
        DriftFamily::Signpower {
            lambda,
            c_plus,
            c_minus,
        } => {
            match e.key.as_str() {
                "drift.lambda" => *lambda = x,
                "drift.c_plus" => *c_plus = x,
                _ => *c_minus = x,
            }
            Ok(())
        }
        DriftFamily::Step => Err(ConfigError {
            line: e.line,
            message: format!("`{}` only applies to drift.family = signpower", e.key),
        }),
    }
}

fn apply_one(cfg: &mut ExperimentConfig, e: &Entry) -> Result<(), ConfigError> {
    match e.key.as_str() {
        "seed" => cfg.seed = parse(e, "an unsigned integer")?,
        "n_paths" => cfg.n_paths = parse(e, "an unsigned integer")?,
        "threads" => cfg.threads = Some(parse(e, "an unsigned integer")?),
        "grid.horizon" => cfg.grid.horizon = parse(e, "a number")?,
        "grid.n_steps" => cfg.grid.n_steps = parse(e, "an unsigned integer")?,
        "process.kind" => {
            cfg.process.kind = e.value.parse::<ProcessKind>().map_err(|err| ConfigError {
                line: e.line,
                message: err.to_string(),
            })?
        }
        "process.x0" => cfg.process.x0 = parse(e, "a number")?,
        "process.side" => {
            cfg.process.side = named(
                e,
                &[("positive", Side::Positive), ("negative", Side::Negative)],
            )?
        }
        "process.gamma" => cfg.process.gamma = parse(e, "a number")?,
        "process.alpha_plus" => cfg.process.alpha_plus = parse(e, "a number")?,
        "process.alpha_minus" => cfg.process.alpha_minus = parse(e, "a number")?,
        "process.initial_sign" => cfg.process.initial_sign = parse(e, "+1 or -1")?,
        "process.epsilon" => cfg.process.epsilon = parse(e, "a number")?,
        "process.p_hit" => cfg.process.p_hit = parse(e, "a number")?,
        "drift.family" => {
            cfg.drift.family = match e.value.to_ascii_lowercase().as_str() {
                "step" => DriftFamily::Step,
                "signpower" => match cfg.drift.family {
                    f @ DriftFamily::Signpower { .. } => f,
                    DriftFamily::Step => DriftFamily::Signpower {
                        lambda: 1.0,
                        c_plus: 1.0,
                        c_minus: 1.0,
                    },
                },
                _ => {
                    return Err(ConfigError {
                        line: e.line,
                        message: format!(
                            "`drift.family` expects one of step, signpower, got `{}`",
                            e.value
                        ),
                    })
                }
            }
        }
        "drift.lambda" | "drift.c_plus" | "drift.c_minus" => signpower_field(cfg, e)?,
        "calibration.mode" => {
            cfg.calibration.mode = named(
                e,
                &[
                    ("two_sided", LMode::TwoSided),
                    ("one_sided", LMode::OneSided),
                    ("reflecting", LMode::Reflecting),
                    ("fixed", LMode::Fixed),
                ],
            )?
        }
        "calibration.alpha" => cfg.calibration.alpha = parse(e, "a number")?,
        "calibration.beta" => cfg.calibration.beta = parse(e, "a number")?,
        "calibration.delta" => cfg.calibration.delta = parse(e, "a number")?,
        "calibration.l" => cfg.calibration.l = parse(e, "a number")?,
        "experiment.epsilon" => cfg.experiment.epsilon = parse(e, "a number")?,
        "experiment.epsilons" => cfg.experiment.epsilons = parse_list(e)?,
        "experiment.theta" => cfg.experiment.theta = parse(e, "a number")?,
        "experiment.t" => cfg.experiment.t = parse(e, "a number")?,
        "experiment.dt" => {
            cfg.experiment.dt = match e.value.as_str() {
                "" | "auto" => None,
                _ => Some(parse(e, "a number or `auto`")?),
            }
        }
        "experiment.deltas" => cfg.experiment.deltas = parse_list(e)?,
        "tolerance.z" => cfg.tolerance.z = parse(e, "a number")?,
        "tolerance.ks_level" => {
            cfg.tolerance.ks_level = match e.value.trim_end_matches('%') {
                "1" => KsLevel::OnePercent,
                "5" => KsLevel::FivePercent,
                _ => e.value.parse().map_err(|_| ConfigError {
                    line: e.line,
                    message: format!("`tolerance.ks_level` expects 1% or 5%, got `{}`", e.value),
                })?,
            }
        }
        other => {
            return Err(ConfigError {
                line: e.line,
                message: format!(
                    "unknown key `{other}` (did you mean `{}`?)",
                    nearest_key(other)
                ),
            })
        }
    }
    Ok(())
}

/// Apply entries in order, except that `drift.family` is applied before the
/// family's parameters.
pub fn apply(cfg: &mut ExperimentConfig, entries: &[Entry]) -> Result<(), ConfigError> {
    let (family, rest): (Vec<&Entry>, Vec<&Entry>) =
        entries.iter().partition(|e| e.key == "drift.family");
    for e in family.into_iter().chain(rest) {
        apply_one(cfg, e)?;
    }
    Ok(())
}
