use serde::{Deserialize, Serialize};

use super::experiments::McOptions;
use crate::drift::{
    builtin_drift, calibrate_l, reflecting_l, CalibrationMode, DriftFamily, DriftSpec,
};
use crate::error::{invalid, Result};
use crate::path::TimeGrid;
use crate::skorokhod::Side;
use crate::stats::{KsLevel, GATE_Z};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Wiener,
    Reflected,
    Skew,
    HardMembrane,
    Euler,
    KilledLadder,
}

impl ProcessKind {
    pub const ALL: [ProcessKind; 6] = [
        ProcessKind::Wiener,
        ProcessKind::Reflected,
        ProcessKind::Skew,
        ProcessKind::HardMembrane,
        ProcessKind::Euler,
        ProcessKind::KilledLadder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::Wiener => "wiener",
            ProcessKind::Reflected => "reflected",
            ProcessKind::Skew => "skew",
            ProcessKind::HardMembrane => "hard_membrane",
            ProcessKind::Euler => "euler",
            ProcessKind::KilledLadder => "killed_ladder",
        }
    }
}

impl std::str::FromStr for ProcessKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace('-', "_");
        ProcessKind::ALL
            .into_iter()
            .find(|k| k.name() == t)
            .ok_or_else(|| {
                let names: Vec<_> = ProcessKind::ALL.iter().map(|k| k.name()).collect();
                invalid(
                    "process.kind",
                    format!(
                        "unknown process `{s}`, expected one of {}",
                        names.join(", ")
                    ),
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub horizon: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub kind: ProcessKind,
    pub x0: f64,
    pub side: Side,
    pub gamma: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub initial_sign: i8,
    pub epsilon: f64,
    pub p_hit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftConfig {
    pub family: DriftFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LMode {
    /// Two-sided calibration at rate `alpha`.
    TwoSided,
    /// One-sided calibration at `beta`.
    OneSided,
    /// Inflated strength with margin `delta`; the membrane closes.
    Reflecting,
    /// Use `l` as given.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub mode: LMode,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub epsilon: f64,
    pub epsilons: Vec<f64>,
    pub theta: f64,
    pub t: f64,
    /// Step override; `None` means the experiment's default.
    pub dt: Option<f64>,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub z: f64,
    pub ks_level: KsLevel,
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_paths: usize,
    pub threads: Option<usize>,
    pub grid: GridConfig,
    pub process: ProcessConfig,
    pub drift: DriftConfig,
    pub calibration: CalibrationConfig,
    pub experiment: ExperimentParams,
    pub tolerance: ToleranceConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_paths: 1,
            threads: None,
            grid: GridConfig {
                horizon: 1.0,
                n_steps: 1000,
            },
            process: ProcessConfig {
                kind: ProcessKind::Wiener,
                x0: 0.0,
                side: Side::Positive,
                gamma: 0.0,
                alpha_plus: 1.0,
                alpha_minus: 1.0,
                initial_sign: 1,
                epsilon: 0.1,
                p_hit: 0.1,
            },
            drift: DriftConfig {
                family: DriftFamily::Step,
            },
            calibration: CalibrationConfig {
                mode: LMode::TwoSided,
                alpha: 1.0,
                beta: 1.0,
                delta: 1.0,
                l: 0.0,
            },
            experiment: ExperimentParams {
                epsilon: 0.1,
                epsilons: vec![0.2, 0.1, 0.05],
                theta: 0.5,
                t: 1.0,
                dt: None,
                deltas: vec![0.01, 0.1],
            },
            tolerance: ToleranceConfig {
                z: GATE_Z,
                ks_level: KsLevel::OnePercent,
            },
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(invalid("n_paths", "must be >= 1"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads", "must be >= 1"));
        }
        self.time_grid()?;
        self.drift_spec()?;
        if !(self.tolerance.z > 0.0) {
            return Err(invalid(
                "tolerance.z",
                format!("must be > 0, got {}", self.tolerance.z),
            ));
        }
        if let Some(dt) = self.experiment.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("experiment.dt", format!("must be > 0, got {dt}")));
            }
        }
        Ok(())
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.grid.horizon, self.grid.n_steps)
    }

    pub fn drift_spec(&self) -> Result<DriftSpec> {
        builtin_drift(self.drift.family)
    }

    pub fn options(&self) -> McOptions {
        McOptions {
            n: self.n_paths,
            seed: self.seed,
            threads: self.threads,
            z: self.tolerance.z,
        }
    }

    /// Drift strength at `epsilon` according to the calibration section.
    pub fn strength(&self, d: &DriftSpec, epsilon: f64) -> Result<f64> {
        let c = &self.calibration;
        match c.mode {
            LMode::TwoSided => {
                Ok(calibrate_l(d, c.alpha, epsilon, CalibrationMode::TwoSided)?.l_epsilon)
            }
            LMode::OneSided => Ok(calibrate_l(
                d,
                c.alpha,
                epsilon,
                CalibrationMode::OneSided { beta: c.beta },
            )?
            .l_epsilon),
            LMode::Reflecting => reflecting_l(d, epsilon, c.delta),
            LMode::Fixed => {
                if !(c.l >= 0.0 && c.l.is_finite()) {
                    return Err(invalid(
                        "calibration.l",
                        format!("must be finite and >= 0, got {}", c.l),
                    ));
                }
                Ok(c.l)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut c = ExperimentConfig::default();
        c.drift.family = DriftFamily::Signpower {
            lambda: 1.0,
            c_plus: 1.0,
            c_minus: 4.0,
        };
        c.experiment.dt = Some(1e-4);
        let s = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn process_names_parse() {
        for k in ProcessKind::ALL {
            assert_eq!(k.name().parse::<ProcessKind>().unwrap(), k);
        }
        assert_eq!(
            "hard-membrane".parse::<ProcessKind>().unwrap(),
            ProcessKind::HardMembrane
        );
        assert!("brownian".parse::<ProcessKind>().is_err());
    }

    #[test]
    fn strength_modes() {
        let mut c = ExperimentConfig::default();
        let d = c.drift_spec().unwrap();
        assert!((c.strength(&d, 1e-4).unwrap() - 5.368_760).abs() < 1e-6);
        c.calibration.mode = LMode::Fixed;
        c.calibration.l = 2.5;
        assert_eq!(c.strength(&d, 0.1).unwrap(), 2.5);
        c.calibration.mode = LMode::Reflecting;
        assert!(c.strength(&d, 0.05).unwrap() > 2.5);
    }
}
