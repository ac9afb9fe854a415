//! The one-sided Skorokhod reflection map at 0, the ladder transform that
//! approximates it on an ε-lattice, and an occupation-density estimator of
//! local time.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::path::Path;

/// Half-line into which a path is reflected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Side::Positive => Side::Negative,
            Side::Negative => Side::Positive,
        }
    }

    pub fn from_sign(s: i8) -> Option<Self> {
        match s {
            1 => Some(Side::Positive),
            -1 => Some(Side::Negative),
            _ => None,
        }
    }
}

/// Reflected path `g` and its regulator `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkorokhodSolution {
    pub g: Path,
    pub l: Path,
}

/// Reflect `f` at 0 into the half-line `side`.
///
/// For the positive side `l(t) = -min_{s<=t} (f(s) ∧ 0)` and `g = f + l`.
/// A path that starts on the wrong side is left untouched up to the first
/// grid index where it reaches 0 and is reflected from there on.
pub fn skorokhod_map(f: &Path, side: Side) -> SkorokhodSolution {
    match side {
        Side::Positive => reflect_up(f),
        Side::Negative => {
            let mirrored = reflect_up(&negate(f));
            SkorokhodSolution {
                g: negate(&mirrored.g),
                l: mirrored.l,
            }
        }
    }
}

fn negate(p: &Path) -> Path {
    Path::from_parts(*p.grid(), p.values().iter().map(|v| -v).collect())
}

fn reflect_up(f: &Path) -> SkorokhodSolution {
    let v = f.values();
    let n = v.len();
    let mut g = v.to_vec();
    let mut l = vec![0.0; n];
    if let Some(start) = v.iter().position(|&x| x >= 0.0) {
        let mut reg: f64 = 0.0;
        for i in start..n {
            if -v[i] > reg {
                reg = -v[i];
            }
            l[i] = reg;
            g[i] = v[i] + reg;
        }
    }
    SkorokhodSolution {
        g: Path::from_parts(*f.grid(), g),
        l: Path::from_parts(*f.grid(), l),
    }
}

/// `x_tilde = w + ε n_tilde`, with `n_tilde` counting how many ε-rungs the
/// running minimum of `w - 2ε` has descended below 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderPath {
    pub x_tilde: Path,
    pub n_tilde: Vec<u64>,
    pub epsilon: f64,
}

impl LadderPath {
    /// `ε n_tilde` as a path.
    pub fn scaled_count(&self) -> Path {
        Path::from_parts(
            *self.x_tilde.grid(),
            self.n_tilde
                .iter()
                .map(|&k| self.epsilon * k as f64)
                .collect(),
        )
    }
}

pub fn ladder_transform(w: &Path, epsilon: f64) -> Result<LadderPath> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("must be > 0, got {epsilon}")));
    }
    if !(w.first() > epsilon) {
        return Err(invalid(
            "w(0)",
            format!(
                "ladder needs w(0) > epsilon, got w(0) = {} <= {epsilon}",
                w.first()
            ),
        ));
    }
    let mut low: f64 = 0.0;
    let mut n_tilde = Vec::with_capacity(w.len());
    let mut x = Vec::with_capacity(w.len());
    for &wi in w.values() {
        low = low.min(wi - 2.0 * epsilon);
        let k = (-low / epsilon).floor() as u64;
        n_tilde.push(k);
        x.push(wi + epsilon * k as f64);
    }
    Ok(LadderPath {
        x_tilde: Path::from_parts(*w.grid(), x),
        n_tilde,
        epsilon,
    })
}

/// Occupation-density local time at 0,
/// `(2h)^{-1} ∫_0^t 1{|p(s)| <= h} ds`, as a left Riemann sum on the grid.
pub fn occupation_local_time(p: &Path, half_width: f64) -> Result<Path> {
    if !(half_width > 0.0) {
        return Err(invalid(
            "half_width",
            format!("must be > 0, got {half_width}"),
        ));
    }
    let w = p.grid().dt() / (2.0 * half_width);
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(p.len());
    out.push(0.0);
    for &v in &p.values()[..p.len() - 1] {
        if v.abs() <= half_width {
            acc += w;
        }
        out.push(acc);
    }
    Ok(Path::from_parts(*p.grid(), out))
}
