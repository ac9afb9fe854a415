use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stats::{
    ks_critical, ks_critical_two_sample, ks_statistic, ks_two_sample, mean_var, wilson_interval,
    KsLevel,
};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub n: usize,
    pub dt: Option<f64>,
    pub wall_time_s: f64,
    pub censored: usize,
    pub notes: Vec<String>,
}

/// One line of an experiment report.
///
/// For estimates checked against a reference value, `statistic` is the
/// absolute deviation and `critical` is `z * stderr` plus any declared slack.
/// For KS tests both are distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub metric: String,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub statistic: Option<f64>,
    pub critical: Option<f64>,
    pub pass: bool,
    pub meta: RunMeta,
}

impl McReport {
    /// A bare value with no test attached; passes trivially.
    pub fn value(metric: impl Into<String>, estimate: f64) -> Self {
        Self {
            metric: metric.into(),
            estimate,
            stderr: None,
            ci_lo: None,
            ci_hi: None,
            statistic: None,
            critical: None,
            pass: true,
            meta: RunMeta::default(),
        }
    }

    /// Fraction `k / n` with a Wilson interval at `z`; `n < 2` gives `[0, 1]`.
    pub fn proportion(metric: impl Into<String>, k: usize, n: usize, z: f64) -> Self {
        let est = if n == 0 {
            f64::NAN
        } else {
            k as f64 / n as f64
        };
        let (lo, hi) = if n < 2 {
            (0.0, 1.0)
        } else {
            wilson_interval(k, n, z)
        };
        let mut r = Self::value(metric, est);
        r.stderr = Some((hi - lo) / (2.0 * z));
        r.ci_lo = Some(lo);
        r.ci_hi = Some(hi);
        r.meta.n = n;
        r
    }

    /// Sample mean with a normal interval `mean ± z·sd/√n`.
    pub fn mean(metric: impl Into<String>, xs: &[f64], z: f64) -> Result<Self> {
        let (m, v) = mean_var(xs)?;
        let se = (v / xs.len() as f64).sqrt();
        let mut r = Self::value(metric, m);
        r.stderr = Some(se);
        r.ci_lo = Some(m - z * se);
        r.ci_hi = Some(m + z * se);
        r.meta.n = xs.len();
        Ok(r)
    }

    /// Estimate with a known standard error and `±z·se` interval.
    pub fn with_stderr(metric: impl Into<String>, estimate: f64, se: f64, z: f64) -> Self {
        let mut r = Self::value(metric, estimate);
        r.stderr = Some(se);
        r.ci_lo = Some(estimate - z * se);
        r.ci_hi = Some(estimate + z * se);
        r
    }

    /// Gate: `|estimate - target| <= z * stderr + slack`.
    pub fn against(mut self, target: f64, z: f64, slack: f64) -> Self {
        let dev = (self.estimate - target).abs();
        let crit = z * self.stderr.unwrap_or(0.0) + slack;
        self.statistic = Some(dev);
        self.critical = Some(crit);
        self.pass = dev <= crit;
        self
    }

    /// Gate: `statistic <= critical` for a given pair.
    pub fn gated(mut self, statistic: f64, critical: f64) -> Self {
        self.statistic = Some(statistic);
        self.critical = Some(critical);
        self.pass = statistic <= critical;
        self
    }

    pub fn with_meta(mut self, meta: RunMeta) -> Self {
        self.meta = meta;
        self
    }

    /// `(ci_hi - ci_lo) / 2`, which equals `z * stderr` for symmetric intervals.
    pub fn half_width(&self) -> Option<f64> {
        Some(0.5 * (self.ci_hi? - self.ci_lo?))
    }
}

pub fn ks_report(samples: &[f64], cdf: impl Fn(f64) -> f64, level: KsLevel) -> Result<McReport> {
    let d = ks_statistic(samples, cdf)?;
    let mut r = McReport::value("ks_distance", d).gated(d, ks_critical(samples.len(), level));
    r.meta.n = samples.len();
    Ok(r)
}

pub fn ks_two_sample_report(a: &[f64], b: &[f64], level: KsLevel) -> Result<McReport> {
    let d = ks_two_sample(a, b)?;
    let mut r = McReport::value("ks2_distance", d)
        .gated(d, ks_critical_two_sample(a.len(), b.len(), level));
    r.meta.n = a.len();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::stats::normal_cdf;

    #[test]
    fn proportion_edges() {
        let r = McReport::proportion("p", 1, 1, 3.0);
        assert_eq!((r.ci_lo, r.ci_hi), (Some(0.0), Some(1.0)));
        assert_eq!(r.estimate, 1.0);
        let r = McReport::proportion("p", 30, 100, 3.0).against(0.3, 3.0, 0.0);
        assert!(r.pass);
        let hw = r.half_width().unwrap();
        assert!((hw - 3.0 * r.stderr.unwrap()).abs() < 1e-15);
    }

    #[test]
    fn ks_report_null_and_misfit() {
        let xs: Vec<f64> = (0..10_000u64)
            .map(|k| {
                RngStream::new(8, k)
                    .rng(crate::rng::Channel::Increments)
                    .standard_normal()
            })
            .collect();
        assert!(
            ks_report(&xs, normal_cdf, KsLevel::OnePercent)
                .unwrap()
                .pass
        );
        let r = ks_report(&xs, |x| normal_cdf(x - 0.5), KsLevel::OnePercent).unwrap();
        assert!(!r.pass);
        assert!(ks_report(&[], normal_cdf, KsLevel::OnePercent).is_err());
    }

    #[test]
    fn ks_null_scale() {
        // mean KS distance of uniform samples is about 0.87 / sqrt(n)
        let n = 400;
        let reps = 300;
        let mut total = 0.0;
        for r in 0..reps {
            let mut g = RngStream::new(99, r).rng(crate::rng::Channel::Aux);
            let xs: Vec<f64> = (0..n).map(|_| g.open01()).collect();
            total += ks_statistic(&xs, |x| x).unwrap() * (n as f64).sqrt();
        }
        let m = total / reps as f64;
        assert!((m - 0.8687).abs() < 0.05, "scaled mean {m}");
    }
}
