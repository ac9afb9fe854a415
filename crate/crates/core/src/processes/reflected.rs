use serde::{Deserialize, Serialize};

use crate::path::{Path, TimeGrid};
use crate::rng::RngStream;
use crate::skorokhod::{skorokhod_map, Side};
use crate::wiener::{sample_wiener, BridgeExtrema, Increments};

/// How the running extremum that drives the regulator is observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monitoring {
    /// Only grid values enter the running minimum.
    Grid,
    /// The exact minimum of the Brownian bridge between grid points enters
    /// the running minimum, so `(g, l)` are exact at the grid points.
    #[default]
    Bridge,
}

/// Incremental one-sided reflection of a path fed step by step.
///
/// Tracks `l = max(0, -min f)` (positive side) or `l = max(0, max f)`
/// (negative side) over everything seen since the phase started.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Reflector {
    side: Side,
    regulator: f64,
}

impl Reflector {
    pub(crate) fn new(side: Side) -> Self {
        Self {
            side,
            regulator: 0.0,
        }
    }

    /// Feed the extremum of the driving path over the last step and return
    /// the updated regulator.
    #[inline]
    pub(crate) fn push_extremum(&mut self, ext: f64) -> f64 {
        let push = match self.side {
            Side::Positive => -ext,
            Side::Negative => ext,
        };
        if push > self.regulator {
            self.regulator = push;
        }
        self.regulator
    }

    #[inline]
    pub(crate) fn regulator(&self) -> f64 {
        self.regulator
    }

    #[inline]
    pub(crate) fn value(&self, f: f64) -> f64 {
        match self.side {
            Side::Positive => f + self.regulator,
            Side::Negative => f - self.regulator,
        }
    }
}

/// Reflected Brownian motion and its local time at 0, exact at grid points.
pub fn sample_reflected_bm(
    grid: &TimeGrid,
    x0: f64,
    side: Side,
    stream: RngStream,
) -> (Path, Path) {
    sample_reflected_bm_with(grid, x0, side, stream, Monitoring::Bridge)
}

pub fn sample_reflected_bm_with(
    grid: &TimeGrid,
    x0: f64,
    side: Side,
    stream: RngStream,
    monitoring: Monitoring,
) -> (Path, Path) {
    if monitoring == Monitoring::Grid {
        let sol = skorokhod_map(&sample_wiener(grid, x0, stream), side);
        return (sol.g, sol.l);
    }
    let dt = grid.dt();
    let mut inc = Increments::new(stream, dt);
    let mut bridge = BridgeExtrema::new(stream, dt);
    let lower = side == Side::Positive;
    let on_side = |x: f64| side.sign() * x >= 0.0;

    let mut g = Vec::with_capacity(grid.len());
    let mut l = Vec::with_capacity(grid.len());
    let mut w = x0;
    let mut refl = Reflector::new(side);
    let mut active = on_side(x0);
    g.push(if active { refl.value(w) } else { w });
    l.push(0.0);
    for _ in 0..grid.n_steps() {
        let next = w + inc.next();
        // one bridge draw per step keeps the channel aligned with other samplers
        let ext = bridge.extremum(w, next, lower);
        w = next;
        if active {
            refl.push_extremum(ext);
        } else if on_side(w) {
            // reflection starts at the first grid point on the admissible side
            active = true;
        }
        g.push(if active { refl.value(w) } else { w });
        l.push(refl.regulator());
    }
    (Path::from_parts(*grid, g), Path::from_parts(*grid, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_monitoring_is_skorokhod_of_wiener() {
        let grid = TimeGrid::new(1.0, 500).unwrap();
        let s = RngStream::new(4, 2);
        let (g, l) = sample_reflected_bm_with(&grid, 0.1, Side::Positive, s, Monitoring::Grid);
        let sol = skorokhod_map(&sample_wiener(&grid, 0.1, s), Side::Positive);
        assert_eq!(g, sol.g);
        assert_eq!(l, sol.l);
    }

    #[test]
    fn bridge_regulator_dominates_grid_regulator() {
        let grid = TimeGrid::new(1.0, 500).unwrap();
        for k in 0..20 {
            let s = RngStream::new(4, k);
            let (g, l) = sample_reflected_bm(&grid, 0.0, Side::Positive, s);
            let w = sample_wiener(&grid, 0.0, s);
            let lg = skorokhod_map(&w, Side::Positive).l;
            for i in 0..grid.len() {
                assert!(l[i] >= lg[i]);
                assert!(g[i] >= 0.0);
                assert_eq!(g[i], w[i] + l[i]);
            }
            assert!(l.values().windows(2).all(|p| p[1] >= p[0]));
        }
    }

    #[test]
    fn far_from_boundary_no_local_time() {
        let grid = TimeGrid::new(0.01, 100).unwrap();
        for k in 0..50 {
            let (_, l) = sample_reflected_bm(&grid, 10.0, Side::Positive, RngStream::new(1, k));
            assert!(l.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn negative_side_mirrors_positive() {
        let grid = TimeGrid::new(1.0, 200).unwrap();
        let s = RngStream::new(8, 8);
        let (gn, ln) = sample_reflected_bm(&grid, 0.0, Side::Negative, s);
        assert!(gn.values().iter().all(|&v| v <= 0.0));
        assert!(ln.values().windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn wrong_side_start_is_free_until_zero() {
        let grid = TimeGrid::new(1.0, 1000).unwrap();
        let s = RngStream::new(2, 3);
        let (g, l) = sample_reflected_bm(&grid, -0.2, Side::Positive, s);
        let w = sample_wiener(&grid, -0.2, s);
        let hit = w.values().iter().position(|&v| v >= 0.0);
        match hit {
            Some(k) => {
                assert_eq!(&g.values()[..k], &w.values()[..k]);
                assert!(l.values()[..=k].iter().all(|&v| v == 0.0));
                assert!(g.values()[k..].iter().all(|&v| v >= 0.0));
            }
            None => assert_eq!(g, w),
        }
    }
}
