use rand_distr::{Distribution, Geometric};

use crate::error::{invalid, Result};
use crate::path::TimeGrid;
use crate::rng::{Channel, RngStream};
use crate::skorokhod::{ladder_transform, LadderPath};
use crate::wiener::sample_wiener;

#[derive(Debug, Clone, PartialEq)]
pub struct KilledLadder {
    pub ladder: LadderPath,
    /// First grid time with `n_tilde >= geometric_draw`, `+inf` if the
    /// horizon ends first.
    pub zeta_tilde: f64,
    pub geometric_draw: u64,
}

impl KilledLadder {
    pub fn killed(&self) -> bool {
        self.zeta_tilde.is_finite()
    }

    /// Grid index of `t ∧ ζ̃`.
    pub fn stopped_index(&self, t: f64) -> usize {
        let grid = self.ladder.x_tilde.grid();
        grid.index_at(t.min(self.zeta_tilde))
    }
}

/// `G` on `{1, 2, ...}` with `P(G = k) = (1 - p)^{k-1} p`.
pub fn sample_geometric(p: f64, stream: RngStream) -> Result<u64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p_hit", format!("must lie in (0, 1], got {p}")));
    }
    let geo = Geometric::new(p).map_err(|e| invalid("p_hit", e.to_string()))?;
    Ok(1 + geo.sample(&mut stream.rng(Channel::Aux)))
}

pub fn sample_killed_ladder(
    grid: &TimeGrid,
    x0: f64,
    epsilon: f64,
    p_hit: f64,
    stream: RngStream,
) -> Result<KilledLadder> {
    let w = sample_wiener(grid, x0, stream);
    let ladder = ladder_transform(&w, epsilon)?;
    let g = sample_geometric(p_hit, stream)?;
    let zeta_tilde = ladder
        .n_tilde
        .iter()
        .position(|&n| n >= g)
        .map_or(f64::INFINITY, |i| grid.time(i));
    Ok(KilledLadder {
        ladder,
        zeta_tilde,
        geometric_draw: g,
    })
}
