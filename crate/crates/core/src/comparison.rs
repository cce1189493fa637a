//! Hessian and Osserman comparison on rotationally symmetric metrics.
//!
//! For `ds² = dρ² + G(ρ)² dθ²` the distance Hessian is
//! `Hess r(∂θ, ∂θ) = G·G_ρ` with `|∂θ|² = G²`, and `Hess r(γ′, γ′) = 0`
//! along radial geodesics, so both theorems reduce to inequalities between
//! one-variable functions sampled on `(0, ρ_max)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metric::{CurvatureBound, CurvatureSign, RotMetric};

pub const SAMPLES: usize = 200;
/// Step of the centered differences for `G_ρ`.
pub const DIFF_STEP: f64 = 1e-5;
pub const COMPARISON_TOL: f64 = 1e-7;
/// Slack when testing the curvature precondition on numerical curvatures.
pub const CURVATURE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ComparisonStatus {
    Checked,
    PreconditionViolated { rho: f64, detail: String },
}

/// One sampled inequality `lhs ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl Series {
    pub fn min_margin(&self) -> f64 {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(l, r)| l - r)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_margin(&self) -> f64 {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .fold(0.0f64, |a, (l, r)| a.max((l - r).abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rho_samples: Vec<f64>,
    pub series: Vec<Series>,
    /// Minimum of `lhs − rhs` over every series; NaN when not checked.
    pub min_margin: f64,
    /// Largest `|lhs − rhs|`, used for the equality cases.
    pub max_abs_margin: f64,
    pub tolerance: f64,
    /// `Hess r(γ′, γ′)` along radial geodesics, identically zero here.
    pub radial_hessian: f64,
    pub status: ComparisonStatus,
    pub pass: bool,
}

impl ComparisonReport {
    fn checked(rho_samples: Vec<f64>, series: Vec<Series>) -> Self {
        let min_margin = series
            .iter()
            .map(Series::min_margin)
            .fold(f64::INFINITY, f64::min);
        let max_abs_margin = series
            .iter()
            .map(Series::max_abs_margin)
            .fold(0.0, f64::max);
        Self {
            rho_samples,
            series,
            min_margin,
            max_abs_margin,
            tolerance: COMPARISON_TOL,
            radial_hessian: 0.0,
            pass: min_margin >= -COMPARISON_TOL,
            status: ComparisonStatus::Checked,
        }
    }

    fn violated(rho_samples: Vec<f64>, rho: f64, detail: String) -> Self {
        Self {
            rho_samples,
            series: Vec::new(),
            min_margin: f64::NAN,
            max_abs_margin: f64::NAN,
            tolerance: COMPARISON_TOL,
            radial_hessian: 0.0,
            pass: false,
            status: ComparisonStatus::PreconditionViolated { rho, detail },
        }
    }

    pub fn precondition_violated(&self) -> bool {
        matches!(self.status, ComparisonStatus::PreconditionViolated { .. })
    }
}

fn samples(m: &RotMetric, rho_max: f64) -> Result<Vec<f64>> {
    if !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(invalid(format!("rho_max must be positive, got {rho_max}")));
    }
    if rho_max + 2.0 * DIFF_STEP >= m.distance_range() {
        return Err(invalid(format!(
            "rho_max = {rho_max} reaches the end of the distance range {}",
            m.distance_range()
        )));
    }
    Ok((1..=SAMPLES)
        .map(|k| rho_max * k as f64 / (SAMPLES + 1) as f64)
        .collect())
}

/// `(G, G_ρ)` with the 5-point centered difference.
fn g_and_slope(m: &RotMetric, rho: f64) -> Result<(f64, f64)> {
    let h = DIFF_STEP;
    let g = |x: f64| m.metric_g(x);
    let d = (-g(rho + 2.0 * h)? + 8.0 * g(rho + h)? - 8.0 * g(rho - h)? + g(rho - 2.0 * h)?)
        / (12.0 * h);
    Ok((g(rho)?, d))
}

/// Curvature at geodesic distance `ρ`; exact for closed-form model metrics.
fn curvature_at(m: &RotMetric, rho: f64) -> Result<f64> {
    match m.model_bound() {
        Some(b) => Ok(b.curvature()),
        None => m.gaussian_curvature(m.inverse_distance(rho)?),
    }
}

/// Osserman comparison: if `K ≤ K̂` then `(G²)′/G² ≥ (Ĝ²)′/Ĝ²` and
/// `G² ≥ Ĝ²`.
pub fn osserman_check(m: &RotMetric, m_hat: &RotMetric, rho_max: f64) -> Result<ComparisonReport> {
    let rhos = samples(m, rho_max)?;
    samples(m_hat, rho_max)?;
    for &rho in &rhos {
        let (k, k_hat) = (curvature_at(m, rho)?, curvature_at(m_hat, rho)?);
        if k > k_hat + CURVATURE_SLACK {
            return Ok(ComparisonReport::violated(
                rhos,
                rho,
                format!("K = {k:.9} exceeds K̂ = {k_hat:.9}"),
            ));
        }
    }
    let mut log_deriv = Series {
        name: "log_derivative".into(),
        lhs: Vec::new(),
        rhs: Vec::new(),
    };
    let mut square = Series {
        name: "g_squared".into(),
        lhs: Vec::new(),
        rhs: Vec::new(),
    };
    for &rho in &rhos {
        let (g, dg) = g_and_slope(m, rho)?;
        let (gh, dgh) = g_and_slope(m_hat, rho)?;
        log_deriv.lhs.push(2.0 * dg / g);
        log_deriv.rhs.push(2.0 * dgh / gh);
        square.lhs.push(g * g);
        square.rhs.push(gh * gh);
    }
    Ok(ComparisonReport::checked(rhos, vec![log_deriv, square]))
}

/// Hessian comparison: if `K ≤ c` then `G_ρ/G ≥ h_c(ρ)`.
pub fn hessian_check(
    m: &RotMetric,
    rho_max: f64,
    bound: &CurvatureBound,
) -> Result<ComparisonReport> {
    let rhos = samples(m, rho_max)?;
    if bound.sign() == CurvatureSign::Positive {
        let limit = bound.cap_radius().unwrap_or(f64::INFINITY);
        if rho_max >= limit {
            return Ok(ComparisonReport::violated(
                rhos,
                rho_max,
                format!("rho_max must stay below π/(2κ) = {limit:.9}"),
            ));
        }
    }
    let c = bound.curvature();
    for &rho in &rhos {
        let k = curvature_at(m, rho)?;
        if k > c + CURVATURE_SLACK {
            return Ok(ComparisonReport::violated(
                rhos,
                rho,
                format!("K = {k:.9} exceeds c = {c:.9}"),
            ));
        }
    }
    let mut s = Series {
        name: "hessian".into(),
        lhs: Vec::new(),
        rhs: Vec::new(),
    };
    for &rho in &rhos {
        let (g, dg) = g_and_slope(m, rho)?;
        s.lhs.push(dg / g);
        s.rhs.push(bound.h_c(rho)?);
    }
    Ok(ComparisonReport::checked(rhos, vec![s]))
}
