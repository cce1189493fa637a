//! Radial density profiles `h(s)` of conformal metrics `h(|z|)|dz|`.

use std::fmt;
use std::sync::Arc;

use super::bound::{CurvatureBound, CurvatureSign};
use crate::error::{invalid, Result};
use crate::numeric::CubicSpline;

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A positive radial density on `[0, s_max)`.
#[derive(Clone)]
pub enum Density {
    /// `2/(κ(1+s²))`, `1` or `2/(κ(1−s²))`.
    Constant(CurvatureBound),
    /// `Σ c_k s^{p_k}` with nonnegative integer powers.
    PowerSum(Vec<(f64, i32)>),
    /// Natural cubic spline through user samples, the first at `s = 0`.
    Sampled(CubicSpline),
    /// Arbitrary closure; derivatives are taken numerically.
    Custom(DensityFn),
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Constant(b) => write!(f, "Constant({b})"),
            Density::PowerSum(t) => write!(f, "PowerSum({t:?})"),
            Density::Sampled(s) => write!(f, "Sampled(domain {:?})", s.domain()),
            Density::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Density {
    pub fn sampled(samples: &[[f64; 2]]) -> Result<Self> {
        if samples.len() < 4 {
            return Err(invalid("a density profile needs at least 4 samples"));
        }
        if samples[0][0] != 0.0 {
            return Err(invalid("the first density sample must be at s = 0"));
        }
        for w in samples.windows(2) {
            if !(w[1][0] > w[0][0]) {
                return Err(invalid(format!(
                    "sample radii must be strictly increasing ({} then {})",
                    w[0][0], w[1][0]
                )));
            }
        }
        if let Some(bad) = samples
            .iter()
            .find(|p| !(p[1] > 0.0 && p[1].is_finite() && p[0].is_finite()))
        {
            return Err(invalid(format!(
                "density samples must be finite and strictly positive; got h({}) = {}",
                bad[0], bad[1]
            )));
        }
        let x = samples.iter().map(|p| p[0]).collect();
        let y = samples.iter().map(|p| p[1]).collect();
        Ok(Density::Sampled(CubicSpline::natural(x, y)))
    }

    pub fn power_sum(terms: Vec<(f64, i32)>) -> Result<Self> {
        if terms.is_empty() || terms.iter().any(|&(c, p)| p < 0 || !c.is_finite()) {
            return Err(invalid(
                "power-sum density needs finite coefficients and powers >= 0",
            ));
        }
        Ok(Density::PowerSum(terms))
    }

    /// Natural domain radius: `1` for the hyperbolic density, the last
    /// sample for tables, infinity otherwise.
    pub fn natural_s_max(&self) -> f64 {
        match self {
            Density::Constant(b) if b.sign() == CurvatureSign::Negative => 1.0,
            Density::Sampled(s) => s.domain().1,
            _ => f64::INFINITY,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match self {
            Density::Constant(b) => constant_value(b, s),
            Density::PowerSum(t) => t.iter().map(|&(c, p)| c * s.powi(p)).sum(),
            Density::Sampled(sp) => sp.eval(s).0,
            Density::Custom(f) => f(s),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            Density::Constant(b) => {
                let k = b.kappa().unwrap_or(1.0);
                match b.sign() {
                    CurvatureSign::Zero => 0.0,
                    CurvatureSign::Positive => {
                        let q = 1.0 + s * s;
                        -4.0 * s / (k * q * q)
                    }
                    CurvatureSign::Negative => {
                        let q = 1.0 - s * s;
                        4.0 * s / (k * q * q)
                    }
                }
            }
            Density::PowerSum(t) => t
                .iter()
                .filter(|&&(_, p)| p > 0)
                .map(|&(c, p)| c * p as f64 * s.powi(p - 1))
                .sum(),
            Density::Sampled(sp) => sp.eval(s).1,
            Density::Custom(f) => {
                let h = 1e-6 * s.abs().max(1e-2);
                let lo = (s - h).max(0.0);
                (f(s + h) - f(lo)) / (s + h - lo)
            }
        }
    }
}

fn constant_value(b: &CurvatureBound, s: f64) -> f64 {
    match (b.sign(), b.kappa()) {
        (CurvatureSign::Positive, Some(k)) => 2.0 / (k * (1.0 + s * s)),
        (CurvatureSign::Negative, Some(k)) => 2.0 / (k * (1.0 - s * s)),
        _ => 1.0,
    }
}
