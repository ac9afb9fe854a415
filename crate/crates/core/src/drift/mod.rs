//! Drift profiles, scale functions and the calibration of the drift strength.

pub mod calibrate;
pub mod quad;
pub mod scale;
pub mod spec;

pub use calibrate::{
    beta_from_alpha, calibrate_l, crossing_split_limit, one_sided_limit, reflecting_l, Calibration,
    CalibrationMode,
};
pub use quad::integrate;
pub use scale::{
    crossing_split_exact, hitting_prob_analytic, laplace_asymptotic, laplace_integral,
    scale_function, scale_integral,
};
pub use spec::{builtin_drift, DriftFamily, DriftSpec, RealFn, ScaledDrift};
