//! Batch experiments and their reports.

pub mod config;
pub mod experiments;
pub mod report;
pub mod runner;
pub mod samplers;

pub use config::{
    CalibrationConfig, DriftConfig, ExperimentConfig, ExperimentParams, GridConfig, LMode,
    ProcessConfig, ProcessKind, ToleranceConfig,
};
pub use experiments::{
    crossing_split_mc, estimate_hitting_prob, flip_count_check, marginal_convergence,
    modulus_bound_check, zeta_laplace_check, ConvergenceReport, McOptions,
};
pub use report::{ks_report, ks_two_sample_report, McReport, RunMeta};
pub use runner::par_map;
