//! Drift strength `L_ε` that makes `ε^{-1} p_ε^+` converge to a target rate.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::spec::DriftSpec;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CalibrationMode {
    /// Both sides enter the crossing rate.
    TwoSided,
    /// Only the positive side, parameterized by `β`.
    OneSided { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub alpha: f64,
    pub mode: CalibrationMode,
    pub l_epsilon: f64,
    pub epsilon: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < (-1.0f64).exp()) {
        return Err(invalid(
            "epsilon",
            format!("must lie in (0, 1/e), got {epsilon}"),
        ));
    }
    Ok(())
}

fn check_rate(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(name, format!("must be finite and > 0, got {v}")));
    }
    Ok(())
}

fn c_sum(d: &DriftSpec) -> f64 {
    let r = 1.0 / d.lambda();
    d.c_plus().powf(-r) + d.c_minus().powf(-r)
}

/// `(2A_+)^{-1} [ln(1/ε) + λ^{-1} lnln(1/ε) - (ln rate + lnΓ(1 + 1/λ) + λ^{-1} ln(2A_+) + extra)]`.
fn log_formula(d: &DriftSpec, rate: f64, epsilon: f64, extra: f64) -> f64 {
    let r = 1.0 / d.lambda();
    let le = (1.0 / epsilon).ln();
    let two_a = 2.0 * d.a_plus();
    (le + r * le.ln() - (rate.ln() + ln_gamma(1.0 + r) + r * two_a.ln() + extra)) / two_a
}

pub fn calibrate_l(
    d: &DriftSpec,
    alpha: f64,
    epsilon: f64,
    mode: CalibrationMode,
) -> Result<Calibration> {
    check_epsilon(epsilon)?;
    check_rate("alpha", alpha)?;
    let l = match mode {
        CalibrationMode::TwoSided => log_formula(d, alpha, epsilon, c_sum(d).ln()),
        CalibrationMode::OneSided { beta } => {
            check_rate("beta", beta)?;
            log_formula(d, beta, epsilon, 0.0)
        }
    };
    if !(l > 0.0 && l.is_finite()) {
        return Err(invalid(
            "alpha",
            format!("calibrated L = {l} is not positive; rate too large for epsilon = {epsilon}"),
        ));
    }
    Ok(Calibration {
        alpha,
        mode,
        l_epsilon: l,
        epsilon,
    })
}

/// `β = (c_+^{-1/λ} + c_-^{-1/λ}) α`.
pub fn beta_from_alpha(d: &DriftSpec, alpha: f64) -> f64 {
    c_sum(d) * alpha
}

/// Limit of `ε^{-1} P(reach 0 before 2ε | X(0) = ε)` under the one-sided
/// calibration: `c_+^{1/λ} β`.
pub fn one_sided_limit(d: &DriftSpec, beta: f64) -> f64 {
    d.c_plus().powf(1.0 / d.lambda()) * beta
}

/// `lim P(reach -2ε before 2ε | X(0) = 0) = c_+^{-1/λ} / (c_+^{-1/λ} + c_-^{-1/λ})`.
pub fn crossing_split_limit(d: &DriftSpec) -> f64 {
    d.c_plus().powf(-1.0 / d.lambda()) / c_sum(d)
}

/// `(2A_+)^{-1} (ln(1/ε) + (1 + δ) λ^{-1} lnln(1/ε))`: strong enough that
/// the membrane becomes impermeable in the limit.
pub fn reflecting_l(d: &DriftSpec, epsilon: f64, delta: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid(
            "delta",
            format!("must be finite and > 0, got {delta}"),
        ));
    }
    let le = (1.0 / epsilon).ln();
    Ok((le + (1.0 + delta) / d.lambda() * le.ln()) / (2.0 * d.a_plus()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::{builtin_drift, hitting_prob_analytic, DriftFamily};
    use crate::skorokhod::Side;

    fn step() -> DriftSpec {
        builtin_drift(DriftFamily::Step).unwrap()
    }

    #[test]
    fn step_value() {
        let c = calibrate_l(&step(), 1.0, 1e-4, CalibrationMode::TwoSided).unwrap();
        // (ln 1e4 + lnln 1e4 - ln 2) / 2
        let expect = (9.210_340_371_976_184 + 2.220_326_806_367_846 - std::f64::consts::LN_2) / 2.0;
        assert!((c.l_epsilon - expect).abs() < 1e-12);
        assert!((c.l_epsilon - 5.368_760).abs() < 1e-6);
    }

    #[test]
    fn ranges() {
        let d = step();
        assert!(calibrate_l(&d, 1.0, 0.5, CalibrationMode::TwoSided).is_err());
        assert!(calibrate_l(&d, 0.0, 1e-3, CalibrationMode::TwoSided).is_err());
        assert!(calibrate_l(&d, 1.0, 1e-3, CalibrationMode::OneSided { beta: -1.0 }).is_err());
        assert!(reflecting_l(&d, 1e-3, 0.0).is_err());
    }

    #[test]
    fn one_sided_with_converted_beta_matches_two_sided() {
        for (lambda, cp, cm) in [(1.0, 1.0, 4.0), (0.5, 2.0, 3.0), (2.0, 1.0, 1.0)] {
            let d = builtin_drift(DriftFamily::Signpower {
                lambda,
                c_plus: cp,
                c_minus: cm,
            })
            .unwrap();
            let alpha = 1.7;
            let beta = beta_from_alpha(&d, alpha);
            let two = calibrate_l(&d, alpha, 1e-6, CalibrationMode::TwoSided).unwrap();
            let one = calibrate_l(&d, alpha, 1e-6, CalibrationMode::OneSided { beta }).unwrap();
            assert!((two.l_epsilon - one.l_epsilon).abs() < 1e-12);
            // one-sided rate times the split equals alpha
            let composed = one_sided_limit(&d, beta) * crossing_split_limit(&d);
            assert!((composed - alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn split_limit_values() {
        let sp = |cp, cm| {
            builtin_drift(DriftFamily::Signpower {
                lambda: 1.0,
                c_plus: cp,
                c_minus: cm,
            })
            .unwrap()
        };
        assert_eq!(crossing_split_limit(&sp(3.0, 3.0)), 0.5);
        let d = sp(1.0, 4.0);
        assert!((crossing_split_limit(&d) - 0.8).abs() < 1e-15);
        assert!(
            (crossing_split_limit(&d) + crossing_split_limit(&d.mirrored()) - 1.0).abs() < 1e-15
        );
    }

    #[test]
    fn doubling_a_plus_halves_l_asymptotically() {
        let d1 = builtin_drift(DriftFamily::Signpower {
            lambda: 1.0,
            c_plus: 1.0,
            c_minus: 1.0,
        })
        .unwrap();
        let d2 = builtin_drift(DriftFamily::Signpower {
            lambda: 1.0,
            c_plus: 2.0,
            c_minus: 2.0,
        })
        .unwrap();
        let dev = |k: i32| {
            let eps = 10f64.powi(-k);
            let r = calibrate_l(&d2, 1.0, eps, CalibrationMode::TwoSided)
                .unwrap()
                .l_epsilon
                / calibrate_l(&d1, 1.0, eps, CalibrationMode::TwoSided)
                    .unwrap()
                    .l_epsilon;
            (r - 0.5).abs()
        };
        for k in [4, 30, 300] {
            assert!(dev(k) < 0.02, "k={k}: {}", dev(k));
        }
    }

    #[test]
    fn calibrated_rate_converges_slowly() {
        let d = step();
        let mut prev = f64::INFINITY;
        let mut worst_c: f64 = 0.0;
        for k in 4..=12 {
            let eps = 10f64.powi(-k);
            let l = calibrate_l(&d, 1.0, eps, CalibrationMode::TwoSided)
                .unwrap()
                .l_epsilon;
            let r = hitting_prob_analytic(&d, l, eps, Side::Positive).unwrap() / eps;
            assert!(r < prev, "not monotone at eps=1e-{k}");
            prev = r;
            let le = (1.0 / eps).ln();
            worst_c = worst_c.max((r - 1.0).abs() / (le.ln() / le));
        }
        assert!(worst_c <= 3.0, "C = {worst_c}");
    }

    #[test]
    fn reflecting_regime_rate_vanishes() {
        let d = step();
        let rates: Vec<f64> = [1e-3, 1e-6, 1e-9]
            .iter()
            .map(|&eps| {
                let l = reflecting_l(&d, eps, 1.0).unwrap();
                hitting_prob_analytic(&d, l, eps, Side::Positive).unwrap() / eps
            })
            .collect();
        assert!(rates.windows(2).all(|w| w[1] < w[0]), "{rates:?}");
        assert!(rates[2] < 0.2);
    }
}
