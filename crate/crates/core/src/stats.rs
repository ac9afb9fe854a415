//! Small statistical toolkit: normal CDF, Wilson intervals, KS tests and
//! order-independent summation.

use libm::erfc;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// z-value used by every pass/fail gate.
pub const GATE_Z: f64 = 3.0;

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Half-normal CDF `2Φ(y/σ) - 1` for `y >= 0`.
pub fn half_normal_cdf(y: f64, sigma: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        1.0 - 2.0 * normal_sf(y / sigma)
    }
}

/// Pairwise sum; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(pairwise_sum(xs) / xs.len() as f64)
}

/// Sample mean and unbiased variance (two-pass).
pub fn mean_var(xs: &[f64]) -> Result<(f64, f64)> {
    let m = mean(xs)?;
    if xs.len() < 2 {
        return Ok((m, 0.0));
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    Ok((m, pairwise_sum(&sq) / (xs.len() - 1) as f64))
}

/// Wilson score interval for `k` successes out of `n` at critical value `z`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KsLevel {
    OnePercent,
    FivePercent,
}

impl KsLevel {
    /// Asymptotic critical coefficient `c(level)`.
    pub fn coefficient(self) -> f64 {
        match self {
            KsLevel::OnePercent => 1.628,
            KsLevel::FivePercent => 1.358,
        }
    }
}

impl std::str::FromStr for KsLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0.01" | "1%" | "1" => Ok(KsLevel::OnePercent),
            "0.05" | "5%" | "5" => Ok(KsLevel::FivePercent),
            other => Err(invalid("level", format!("expected 1% or 5%, got {other}"))),
        }
    }
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(x) = samples.iter().find(|x| x.is_nan()) {
        return Err(invalid("samples", format!("NaN in sample: {x}")));
    }
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    Ok(v)
}

/// One-sample KS distance `sup |F_n - F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let v = sorted_finite(samples)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample KS distance `sup |F_n - G_m|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let a = sorted_finite(a)?;
    let b = sorted_finite(b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

pub fn ks_critical(n: usize, level: KsLevel) -> f64 {
    level.coefficient() / (n as f64).sqrt()
}

pub fn ks_critical_two_sample(n: usize, m: usize, level: KsLevel) -> f64 {
    let (n, m) = (n as f64, m as f64);
    level.coefficient() * ((n + m) / (n * m)).sqrt()
}
