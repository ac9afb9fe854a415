//! First passage of a Brownian path below a level, resolved on a fine grid
//! without visiting every grid step.
//!
//! The path is advanced in coarse blocks of `2^levels` fine steps. A block
//! whose bridge could plausibly touch the level is bisected by sampling
//! bridge midpoints, down to single fine steps, where the exact bridge
//! crossing test decides. The reported time is the end of the first fine
//! step whose continuous path touches the level, which has the same law as
//! scanning the fine grid with bridge monitoring.

use crate::rng::{Channel, PhiloxRng, RngStream};
use crate::wiener::bridge_crossing_prob;

/// Blocks with a smaller crossing probability are not refined.
const SKIP_PROB: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct PassageSampler {
    dt: f64,
    levels: u32,
}

impl PassageSampler {
    /// Fine step `dt`, coarse block of `2^levels` steps.
    pub fn new(dt: f64, levels: u32) -> Self {
        assert!(dt > 0.0 && levels <= 30);
        Self { dt, levels }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// First fine-grid time at which a Brownian path from `x0` has touched
    /// `level < x0`, or `None` if it does not before `horizon`.
    pub fn first_passage_below(
        &self,
        x0: f64,
        level: f64,
        horizon: f64,
        stream: RngStream,
    ) -> Option<f64> {
        if x0 <= level {
            return Some(0.0);
        }
        let mut coarse = stream.rng(Channel::Increments);
        let mut mid = stream.rng(Channel::Inversion);
        let mut unif = stream.rng(Channel::Bridge);
        let block = 1u64 << self.levels;
        let h = self.dt * block as f64;
        let n_fine = (horizon / self.dt).ceil() as u64;
        let mut x = x0;
        let mut start = 0u64;
        while start < n_fine {
            let y = x + h.sqrt() * coarse.standard_normal();
            let p = if y <= level {
                1.0
            } else {
                bridge_crossing_prob(x, y, level, h)
            };
            if p > SKIP_PROB {
                if let Some(k) = self.refine(x, y, level, self.levels, &mut mid, &mut unif) {
                    let step = start + k + 1;
                    return (step <= n_fine).then(|| step as f64 * self.dt);
                }
            }
            x = y;
            start += block;
        }
        None
    }

    /// Offset (in fine steps) of the first crossing step inside a bridge of
    /// `2^level` fine steps from `a` to `b`.
    fn refine(
        &self,
        a: f64,
        b: f64,
        level: f64,
        depth: u32,
        mid: &mut PhiloxRng,
        unif: &mut PhiloxRng,
    ) -> Option<u64> {
        if depth == 0 {
            let u = unif.open01();
            let hit = b <= level || u < bridge_crossing_prob(a, b, level, self.dt);
            return hit.then_some(0);
        }
        let h = self.dt * (1u64 << depth) as f64;
        if b > level && bridge_crossing_prob(a, b, level, h) <= SKIP_PROB {
            return None;
        }
        let m = 0.5 * (a + b) + (0.25 * h).sqrt() * mid.standard_normal();
        let half = 1u64 << (depth - 1);
        if let Some(k) = self.refine(a, m, level, depth - 1, mid, unif) {
            return Some(k);
        }
        self.refine(m, b, level, depth - 1, mid, unif)
            .map(|k| half + k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_critical, ks_statistic, normal_sf, KsLevel};

    #[test]
    fn immediate_and_unreachable() {
        let ps = PassageSampler::new(1e-4, 6);
        assert_eq!(
            ps.first_passage_below(0.0, 0.0, 1.0, RngStream::new(1, 1)),
            Some(0.0)
        );
        assert_eq!(
            ps.first_passage_below(50.0, 0.0, 1.0, RngStream::new(1, 1)),
            None
        );
    }

    #[test]
    fn passage_time_law() {
        // P(τ_c <= t) = 2 Φc(c / sqrt(t)) for Brownian motion from 0
        let ps = PassageSampler::new(1e-6, 10);
        let c = 0.3;
        let n = 20_000;
        let horizon = 1.0;
        let mut samples = Vec::new();
        let mut censored = 0usize;
        for k in 0..n {
            match ps.first_passage_below(0.0, -c, horizon, RngStream::new(44, k)) {
                Some(t) => samples.push(t),
                None => censored += 1,
            }
        }
        // compare with the law conditioned on τ <= horizon
        let p_h = 2.0 * normal_sf(c / horizon.sqrt());
        let cdf = |t: f64| {
            if t <= 0.0 {
                0.0
            } else {
                2.0 * normal_sf(c / t.sqrt()) / p_h
            }
        };
        let d = ks_statistic(&samples, cdf).unwrap();
        assert!(
            d < ks_critical(samples.len(), KsLevel::OnePercent),
            "KS {d}"
        );
        let frac = censored as f64 / n as f64;
        let sd = (p_h * (1.0 - p_h) / n as f64).sqrt();
        assert!((frac - (1.0 - p_h)).abs() < 4.0 * sd, "censored {frac}");
    }
}
