use crate::error::{invalid, Result};
use crate::path::Path;

pub use super::euler::Barrier;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub time: f64,
    pub index: usize,
    pub barrier: Barrier,
}

/// First grid time with `p <= lower` or `p >= upper`; `None` if the path
/// stays strictly inside.
pub fn first_hitting(p: &Path, lower: f64, upper: f64) -> Result<Option<Hit>> {
    let x0 = p.first();
    if !(lower < x0 && x0 < upper) {
        return Err(invalid(
            "x0",
            format!("start must lie in ({lower}, {upper}), got {x0}"),
        ));
    }
    let hit = p.values().iter().enumerate().find_map(|(i, &v)| {
        let barrier = if v <= lower {
            Barrier::Lower
        } else if v >= upper {
            Barrier::Upper
        } else {
            return None;
        };
        Some(Hit {
            time: p.grid().time(i),
            index: i,
            barrier,
        })
    });
    Ok(hit)
}
