//! The convex functions `φ` driving the entropy functionals, and the
//! two-point function `Φ(a,b) = (φ'(b) − φ'(a))(b − a)` with its derivatives.
//!
//! The power family interpolates between `a ln a − a + 1` (exponent 1) and
//! `a² − 2a + 1` (exponent 2). Mixtures with nonnegative weights are the
//! custom kind: every quantity below is linear in `φ`, so they inherit
//! convexity of `Φ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ONE_EPS: f64 = 1e-12;
const DOMAIN_LO: f64 = 1e-300;
const DOMAIN_HI: f64 = 1e300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Phi {
    /// Power member with exponent in `[1, 2]`.
    Alpha(f64),
    /// Nonnegative combination `Σ wₖ φ_{αₖ}`.
    Mix { mix: Vec<(f64, f64)> },
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::Alpha(a) => write!(f, "phi_{a}"),
            Phi::Mix { mix } => {
                let parts: Vec<String> = mix.iter().map(|(a, w)| format!("{w}*phi_{a}")).collect();
                write!(f, "{}", parts.join("+"))
            }
        }
    }
}

#[inline]
fn near_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < ONE_EPS
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(1.0..=2.0).contains(&alpha) {
        return Err(Error::Domain(format!("exponent {alpha} outside [1, 2]")));
    }
    Ok(())
}

/// `b^{α−1} − a^{α−1}` scaled by `α/(α−1)`; tends to `ln(b/a)` at α = 1.
#[inline]
fn scaled_power_gap(alpha: f64, a: f64, b: f64) -> f64 {
    let l = (b / a).ln();
    if near_one(alpha) {
        l
    } else {
        let am1 = alpha - 1.0;
        alpha / am1 * a.powf(am1) * (am1 * l).exp_m1()
    }
}

mod power {
    use super::*;

    pub fn phi(alpha: f64, a: f64) -> f64 {
        if near_one(alpha) {
            if a == 0.0 {
                1.0
            } else {
                a * a.ln() - a + 1.0
            }
        } else {
            (a.powf(alpha) - a) / (alpha - 1.0) - a + 1.0
        }
    }

    pub fn d1(alpha: f64, a: f64) -> f64 {
        if near_one(alpha) {
            a.ln()
        } else {
            (alpha * a.powf(alpha - 1.0) - 1.0) / (alpha - 1.0) - 1.0
        }
    }

    pub fn d2(alpha: f64, a: f64) -> f64 {
        alpha * a.powf(alpha - 2.0)
    }

    /// `φ(a) − φ(b) − φ'(b)(a − b)` without cancellation.
    pub fn bregman(alpha: f64, a: f64, b: f64) -> f64 {
        let r = (a - b) / b;
        if near_one(alpha) {
            b * ((1.0 + r) * r.ln_1p() - r)
        } else {
            b.powf(alpha) * ((alpha * r.ln_1p()).exp_m1() - alpha * r) / (alpha - 1.0)
        }
    }

    pub fn big(alpha: f64, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        (b - a) * scaled_power_gap(alpha, a, b)
    }

    pub fn grad(alpha: f64, a: f64, b: f64) -> [f64; 2] {
        let g = scaled_power_gap(alpha, a, b);
        let d = b - a;
        [-g - alpha * d * a.powf(alpha - 2.0), g + alpha * d * b.powf(alpha - 2.0)]
    }

    pub fn hess(alpha: f64, a: f64, b: f64) -> [[f64; 2]; 2] {
        let aa = alpha * alpha * a.powf(alpha - 2.0) + alpha * (2.0 - alpha) * a.powf(alpha - 3.0) * b;
        let bb = alpha * alpha * b.powf(alpha - 2.0) + alpha * (2.0 - alpha) * b.powf(alpha - 3.0) * a;
        let ab = -alpha * (a.powf(alpha - 2.0) + b.powf(alpha - 2.0));
        [[aa, ab], [ab, bb]]
    }
}

impl Phi {
    pub fn alpha(alpha: f64) -> Result<Phi> {
        validate_alpha(alpha)?;
        Ok(Phi::Alpha(alpha))
    }

    pub fn log() -> Phi {
        Phi::Alpha(1.0)
    }

    pub fn quadratic() -> Phi {
        Phi::Alpha(2.0)
    }

    pub fn mixture(mix: Vec<(f64, f64)>) -> Result<Phi> {
        if mix.is_empty() {
            return Err(Error::Domain("empty mixture".into()));
        }
        for &(a, w) in &mix {
            validate_alpha(a)?;
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::Domain(format!("mixture weight {w} must be nonnegative")));
            }
        }
        if mix.iter().all(|&(_, w)| w == 0.0) {
            return Err(Error::Domain("mixture weights are all zero".into()));
        }
        Ok(Phi::Mix { mix })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Phi::Alpha(a) => validate_alpha(*a),
            Phi::Mix { mix } => Phi::mixture(mix.clone()).map(|_| ()),
        }
    }

    /// The exponent, for power members only.
    pub fn exponent(&self) -> Option<f64> {
        match self {
            Phi::Alpha(a) => Some(*a),
            Phi::Mix { .. } => None,
        }
    }

    fn fold<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        match self {
            Phi::Alpha(a) => f(*a),
            Phi::Mix { mix } => mix.iter().map(|&(a, w)| if w == 0.0 { 0.0 } else { w * f(a) }).sum(),
        }
    }

    pub fn value(&self, a: f64) -> f64 {
        self.fold(|al| power::phi(al, a))
    }

    pub fn d1(&self, a: f64) -> f64 {
        self.fold(|al| power::d1(al, a))
    }

    pub fn d2(&self, a: f64) -> f64 {
        self.fold(|al| power::d2(al, a))
    }

    pub fn bregman(&self, a: f64, b: f64) -> f64 {
        self.fold(|al| power::bregman(al, a, b))
    }

    /// `Φ(a,b)`, unchecked.
    #[inline]
    pub fn big(&self, a: f64, b: f64) -> f64 {
        match self {
            Phi::Alpha(al) => power::big(*al, a, b),
            _ => self.fold(|al| power::big(al, a, b)),
        }
    }

    #[inline]
    pub fn grad(&self, a: f64, b: f64) -> [f64; 2] {
        match self {
            Phi::Alpha(al) => power::grad(*al, a, b),
            Phi::Mix { mix } => {
                let mut out = [0.0; 2];
                for &(al, w) in mix {
                    let g = power::grad(al, a, b);
                    out[0] += w * g[0];
                    out[1] += w * g[1];
                }
                out
            }
        }
    }

    pub fn hess(&self, a: f64, b: f64) -> [[f64; 2]; 2] {
        match self {
            Phi::Alpha(al) => power::hess(*al, a, b),
            Phi::Mix { mix } => {
                let mut out = [[0.0; 2]; 2];
                for &(al, w) in mix {
                    let h = power::hess(al, a, b);
                    for r in 0..2 {
                        for c in 0..2 {
                            out[r][c] += w * h[r][c];
                        }
                    }
                }
                out
            }
        }
    }
}

fn check_domain(x: f64) -> Result<()> {
    if !(DOMAIN_LO..=DOMAIN_HI).contains(&x) {
        return Err(Error::Domain(format!("argument {x} outside [1e-300, 1e300]")));
    }
    Ok(())
}

/// `Φ(a,b)` with domain checking.
pub fn big_phi(phi: &Phi, a: f64, b: f64) -> Result<f64> {
    check_domain(a)?;
    check_domain(b)?;
    Ok(phi.big(a, b))
}

/// Gradient of `Φ` with domain checking.
pub fn grad_big_phi(phi: &Phi, a: f64, b: f64) -> Result<[f64; 2]> {
    check_domain(a)?;
    check_domain(b)?;
    Ok(phi.grad(a, b))
}

/// Smaller eigenvalue of a symmetric 2×2 matrix.
pub fn min_eigenvalue(h: [[f64; 2]; 2]) -> f64 {
    let tr = h[0][0] + h[1][1];
    let diff = h[0][0] - h[1][1];
    let disc = (diff * diff + 4.0 * h[0][1] * h[1][0]).max(0.0).sqrt();
    // The larger root is well conditioned; recover the smaller from the determinant.
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let big = 0.5 * (tr + tr.signum() * disc);
    if big != 0.0 {
        let other = det / big;
        other.min(big)
    } else {
        0.5 * (tr - disc)
    }
}
