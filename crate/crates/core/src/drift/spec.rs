use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::quad::integrate;
use crate::error::{invalid, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Named drift families with closed-form antiderivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DriftFamily {
    /// `a(x) = sgn(x) 1{|x| <= 1}`.
    Step,
    /// `a(x) = sgn(x) (λ c_± / 2) |x|^{λ-1} 1{|x| <= 1}`.
    Signpower {
        lambda: f64,
        c_plus: f64,
        c_minus: f64,
    },
}

/// A drift profile `a` supported in `[-1, 1]` together with its
/// antiderivative `A(x) = ∫_0^x a` and the local law `2A(x) ~ c_± |x|^λ`.
#[derive(Clone)]
pub struct DriftSpec {
    name: String,
    a: RealFn,
    big_a: RealFn,
    a_plus: f64,
    a_minus: f64,
    lambda: f64,
    c_plus: f64,
    c_minus: f64,
}

impl fmt::Debug for DriftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriftSpec")
            .field("name", &self.name)
            .field("a_plus", &self.a_plus)
            .field("a_minus", &self.a_minus)
            .field("lambda", &self.lambda)
            .field("c_plus", &self.c_plus)
            .field("c_minus", &self.c_minus)
            .finish()
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn builtin_drift(family: DriftFamily) -> Result<DriftSpec> {
    match family {
        DriftFamily::Step => DriftSpec::new(
            "step",
            Arc::new(|x: f64| if x.abs() <= 1.0 { sgn(x) } else { 0.0 }),
            Arc::new(|x: f64| x.abs().min(1.0)),
            1.0,
            1.0,
            1.0,
            2.0,
            2.0,
        ),
        DriftFamily::Signpower {
            lambda,
            c_plus,
            c_minus,
        } => {
            for (name, v) in [("lambda", lambda), ("c_plus", c_plus), ("c_minus", c_minus)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(invalid(name, format!("must be finite and > 0, got {v}")));
                }
            }
            let a = move |x: f64| {
                if x == 0.0 || x.abs() > 1.0 {
                    0.0
                } else {
                    let c = if x > 0.0 { c_plus } else { c_minus };
                    sgn(x) * 0.5 * lambda * c * x.abs().powf(lambda - 1.0)
                }
            };
            let big_a = move |x: f64| {
                let c = if x >= 0.0 { c_plus } else { c_minus };
                0.5 * c * x.abs().min(1.0).powf(lambda)
            };
            DriftSpec::new(
                format!("signpower(lambda={lambda}, c+={c_plus}, c-={c_minus})"),
                Arc::new(a),
                Arc::new(big_a),
                0.5 * c_plus,
                0.5 * c_minus,
                lambda,
                c_plus,
                c_minus,
            )
        }
    }
}

impl DriftSpec {
    /// Build and validate a drift. `a_minus` is `A(-1) = -∫_{-1}^0 a`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        a: RealFn,
        big_a: RealFn,
        a_plus: f64,
        a_minus: f64,
        lambda: f64,
        c_plus: f64,
        c_minus: f64,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            a,
            big_a,
            a_plus,
            a_minus,
            lambda,
            c_plus,
            c_minus,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("c_plus", self.c_plus),
            ("c_minus", self.c_minus),
            ("A_plus", self.a_plus),
            ("A_minus", self.a_minus),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        for i in 0..=4000 {
            let x = -2.0 + i as f64 * 1e-3;
            let ax = self.a(x);
            if !ax.is_finite() {
                return Err(invalid("a", format!("a({x}) is not finite")));
            }
            if x.abs() > 1.0 + 1e-12 && ax != 0.0 {
                return Err(invalid(
                    "a",
                    format!("support must lie in [-1, 1], a({x}) = {ax}"),
                ));
            }
            if sgn(x) * ax < 0.0 {
                return Err(invalid(
                    "a",
                    format!("sgn(x) a(x) >= 0 violated at x = {x}"),
                ));
            }
        }
        let tol = |v: f64| 1e-9 * v.abs().max(1.0);
        if (self.big_a(1.0) - self.a_plus).abs() > tol(self.a_plus) {
            return Err(invalid(
                "A_plus",
                format!("A(1) = {} differs from A_plus", self.big_a(1.0)),
            ));
        }
        if (self.big_a(-1.0) - self.a_minus).abs() > tol(self.a_minus) {
            return Err(invalid(
                "A_minus",
                format!("A(-1) = {} differs from A_minus", self.big_a(-1.0)),
            ));
        }
        let a = self.a.clone();
        for x in [-1.0, -0.5, 0.5, 1.0] {
            let q = integrate(|y| a(y), 0.0, x, &super::scale::peak_breaks(), 1e-10)?;
            if (q - self.big_a(x)).abs() > 1e-7 * q.abs().max(1.0) {
                return Err(invalid(
                    "A",
                    format!("A({x}) = {} but the integral of a is {q}", self.big_a(x)),
                ));
            }
        }
        for x in [1e-4, 1e-6, -1e-4, -1e-6] {
            let c = if x > 0.0 { self.c_plus } else { self.c_minus };
            let r = 2.0 * self.big_a(x) / (c * x.abs().powf(self.lambda));
            if (r - 1.0).abs() > 0.05 {
                return Err(invalid(
                    "lambda",
                    format!("2A(x) / (c |x|^lambda) = {r} at x = {x}, expected 1 within 5%"),
                ));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn a(&self, x: f64) -> f64 {
        (self.a)(x)
    }

    /// Antiderivative `A(x) = ∫_0^x a`.
    #[inline]
    pub fn big_a(&self, x: f64) -> f64 {
        (self.big_a)(x)
    }

    pub fn a_plus(&self) -> f64 {
        self.a_plus
    }

    pub fn a_minus(&self) -> f64 {
        self.a_minus
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c_plus(&self) -> f64 {
        self.c_plus
    }

    pub fn c_minus(&self) -> f64 {
        self.c_minus
    }

    /// `a_ε(x) = L ε^{-1} a(x / ε)`.
    pub fn scaled(&self, l: f64, epsilon: f64) -> ScaledDrift {
        ScaledDrift {
            a: self.a.clone(),
            gain: l / epsilon,
            inv_eps: 1.0 / epsilon,
        }
    }

    /// Same profile with the sides exchanged: `x ↦ -a(-x)`.
    pub fn mirrored(&self) -> DriftSpec {
        let a = self.a.clone();
        let big_a = self.big_a.clone();
        DriftSpec {
            name: format!("mirror({})", self.name),
            a: Arc::new(move |x| -a(-x)),
            big_a: Arc::new(move |x| big_a(-x)),
            a_plus: self.a_minus,
            a_minus: self.a_plus,
            lambda: self.lambda,
            c_plus: self.c_minus,
            c_minus: self.c_plus,
        }
    }
}

#[derive(Clone)]
pub struct ScaledDrift {
    a: RealFn,
    gain: f64,
    inv_eps: f64,
}

impl ScaledDrift {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.gain * (self.a)(x * self.inv_eps)
    }

    pub fn as_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        move |x| self.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_family() {
        let d = builtin_drift(DriftFamily::Step).unwrap();
        assert_eq!(d.big_a(0.5), 0.5);
        assert_eq!(d.a_plus(), 1.0);
        assert_eq!((d.c_plus(), d.c_minus(), d.lambda()), (2.0, 2.0, 1.0));
        assert_eq!(d.a(0.3), 1.0);
        assert_eq!(d.a(-0.3), -1.0);
        assert_eq!(d.a(1.5), 0.0);
    }

    #[test]
    fn signpower_family() {
        let d = builtin_drift(DriftFamily::Signpower {
            lambda: 2.0,
            c_plus: 1.0,
            c_minus: 1.0,
        })
        .unwrap();
        assert!((d.big_a(0.5) - 0.125).abs() < 1e-15);
        assert_eq!(d.a_plus(), 0.5);
        for lambda in [0.5, 1.0, 2.0] {
            let d = builtin_drift(DriftFamily::Signpower {
                lambda,
                c_plus: 1.0,
                c_minus: 4.0,
            })
            .unwrap();
            for x in [1.0, 1.5, 3.0, 100.0] {
                assert_eq!(d.big_a(x), d.big_a(1.0));
            }
        }
        assert!(builtin_drift(DriftFamily::Signpower {
            lambda: 0.0,
            c_plus: 1.0,
            c_minus: 1.0
        })
        .is_err());
    }

    #[test]
    fn validation_rejects_bad_profiles() {
        // wrong sign on the positive side
        let r = DriftSpec::new(
            "bad-sign",
            Arc::new(|x: f64| if x.abs() <= 1.0 { -x } else { 0.0 }),
            Arc::new(|x: f64| -0.5 * x.min(1.0).max(-1.0).powi(2)),
            0.5,
            0.5,
            2.0,
            1.0,
            1.0,
        );
        assert!(r.is_err());
        // support leaks past 1
        let r = DriftSpec::new(
            "wide",
            Arc::new(|x: f64| if x.abs() <= 1.5 { x.signum() } else { 0.0 }),
            Arc::new(|x: f64| x.abs().min(1.5)),
            1.0,
            1.0,
            1.0,
            2.0,
            2.0,
        );
        assert!(r.is_err());
        // exponent inconsistent with A near 0
        let r = DriftSpec::new(
            "lambda",
            Arc::new(|x: f64| if x.abs() <= 1.0 { x.signum() } else { 0.0 }),
            Arc::new(|x: f64| x.abs().min(1.0)),
            1.0,
            1.0,
            2.0,
            2.0,
            2.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn scaled_and_mirrored() {
        let d = builtin_drift(DriftFamily::Signpower {
            lambda: 1.0,
            c_plus: 1.0,
            c_minus: 4.0,
        })
        .unwrap();
        let s = d.scaled(3.0, 0.1);
        assert!((s.eval(0.05) - 30.0 * 0.5).abs() < 1e-12);
        assert!((s.eval(-0.05) + 30.0 * 2.0).abs() < 1e-12);
        assert_eq!(s.eval(0.2), 0.0);
        let m = d.mirrored();
        assert_eq!((m.c_plus(), m.c_minus()), (4.0, 1.0));
        assert_eq!(m.a(0.5), 2.0);
        assert_eq!(m.big_a(-0.5), 0.25);
    }
}
