use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::bound::{CurvatureBound, CurvatureSign};
use super::density::Density;
use super::table::{DistanceTable, DEFAULT_KNOTS};
use crate::error::{domain, invalid, Result};
use crate::numeric::central_derivatives;

/// Rotationally symmetric conformal metric `h(|z|)|dz|` on the chart disk
/// `|z| < s_max`, with its distance profile `d`, inverse `g = d⁻¹` and
/// `G(ρ) = h(g(ρ))·g(ρ)`.
///
/// Cloning is cheap; the data is shared.
#[derive(Clone)]
pub struct RotMetric {
    inner: Arc<Inner>,
}

#[derive(Clone)]
struct Inner {
    name: String,
    density: Density,
    s_max: f64,
    table: Option<DistanceTable>,
    bound: Option<CurvatureBound>,
}

impl fmt::Debug for RotMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RotMetric")
            .field("name", &self.inner.name)
            .field("density", &self.inner.density)
            .field("s_max", &self.inner.s_max)
            .field("bound", &self.inner.bound)
            .finish()
    }
}

/// The model metric `2|dz|/(κ(1±|z|²))` (or `|dz|`) of constant curvature.
pub fn constant_curvature_metric(bound: CurvatureBound) -> RotMetric {
    RotMetric::constant(bound)
}

impl RotMetric {
    pub fn constant(bound: CurvatureBound) -> Self {
        let density = Density::Constant(bound);
        let name = match bound.sign() {
            CurvatureSign::Zero => "flat".to_string(),
            CurvatureSign::Negative => format!("hyperbolic(kappa={})", bound.kappa().unwrap()),
            CurvatureSign::Positive => format!("spherical(kappa={})", bound.kappa().unwrap()),
        };
        Self {
            inner: Arc::new(Inner {
                name,
                s_max: density.natural_s_max(),
                density,
                table: None,
                bound: Some(bound),
            }),
        }
    }

    pub fn flat() -> Self {
        Self::constant(CurvatureBound::zero())
    }

    /// Tabulated metric. `s_max` defaults to the density's natural radius and
    /// must be finite.
    pub fn from_density(
        name: impl Into<String>,
        density: Density,
        s_max: Option<f64>,
    ) -> Result<Self> {
        Self::with_knots(name, density, s_max, DEFAULT_KNOTS)
    }

    pub fn with_knots(
        name: impl Into<String>,
        density: Density,
        s_max: Option<f64>,
        knots: usize,
    ) -> Result<Self> {
        let s_max = s_max.unwrap_or_else(|| density.natural_s_max());
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(invalid(format!(
                "tabulated metrics need a finite s_max > 0, got {s_max}"
            )));
        }
        if let Density::Sampled(sp) = &density {
            if s_max > sp.domain().1 {
                return Err(invalid("s_max exceeds the last density sample"));
            }
        }
        for k in 0..=512 {
            let s = s_max * k as f64 / 512.0;
            let h = density.value(s);
            if !(h > 0.0 && h.is_finite()) {
                return Err(invalid(format!(
                    "density must be positive and finite; h({s}) = {h}"
                )));
            }
        }
        let table = DistanceTable::build(&density, s_max, knots);
        Ok(Self {
            inner: Arc::new(Inner {
                name: name.into(),
                density,
                s_max,
                table: Some(table),
                bound: None,
            }),
        })
    }

    /// Attach a declared curvature upper bound.
    pub fn with_bound(mut self, bound: CurvatureBound) -> Self {
        Arc::make_mut(&mut self.inner).bound = Some(bound);
        self
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn profile(&self) -> &Density {
        &self.inner.density
    }

    pub fn s_max(&self) -> f64 {
        self.inner.s_max
    }

    /// The closed-form constant-curvature bound, if this is a model metric.
    pub fn model_bound(&self) -> Option<CurvatureBound> {
        match (&self.inner.density, &self.inner.table) {
            (Density::Constant(b), None) => Some(*b),
            _ => None,
        }
    }

    /// Declared bound, falling back to [`RotMetric::infer_bound`].
    pub fn bound(&self) -> CurvatureBound {
        self.inner.bound.unwrap_or_else(|| self.infer_bound())
    }

    pub fn declared_bound(&self) -> Option<CurvatureBound> {
        self.inner.bound
    }

    /// Supremum of the distance profile `d(s_max)`; `∞` when unbounded.
    pub fn distance_range(&self) -> f64 {
        match (&self.inner.table, self.model_bound()) {
            (Some(t), _) => t.d_max(),
            (None, Some(b)) if b.sign() == CurvatureSign::Positive => PI / b.kappa().unwrap(),
            _ => f64::INFINITY,
        }
    }

    pub fn density(&self, s: f64) -> f64 {
        self.inner.density.value(s)
    }

    pub fn density_derivative(&self, s: f64) -> f64 {
        self.inner.density.derivative(s)
    }

    fn check_chart(&self, s: f64) -> Result<()> {
        let open = self.inner.table.is_none();
        let ok = s >= 0.0
            && if open {
                s < self.inner.s_max
            } else {
                s <= self.inner.s_max
            };
        if ok {
            Ok(())
        } else {
            Err(domain(format!(
                "chart radius {s} outside [0, {})",
                self.inner.s_max
            )))
        }
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        let range = self.distance_range();
        let ok = rho >= 0.0
            && if self.inner.table.is_some() {
                rho <= range
            } else {
                rho < range
            };
        if ok {
            Ok(())
        } else {
            Err(domain(format!(
                "rho = {rho} outside the distance range [0, {range})"
            )))
        }
    }

    /// `d(s) = ∫₀ˢ h`.
    pub fn distance(&self, s: f64) -> Result<f64> {
        self.check_chart(s)?;
        Ok(match (&self.inner.table, self.model_bound()) {
            (Some(t), _) => t.distance(s),
            (None, Some(b)) => match (b.sign(), b.kappa()) {
                (CurvatureSign::Positive, Some(k)) => 2.0 / k * s.atan(),
                (CurvatureSign::Negative, Some(k)) => 2.0 / k * s.atanh(),
                _ => s,
            },
            (None, None) => unreachable!("untabulated metrics are constant"),
        })
    }

    /// `g(ρ) = d⁻¹(ρ)`.
    pub fn inverse_distance(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let s = match (&self.inner.table, self.model_bound()) {
            (Some(t), _) => t.inverse(rho, &self.inner.density),
            (None, Some(b)) => match (b.sign(), b.kappa()) {
                (CurvatureSign::Positive, Some(k)) => (0.5 * k * rho).tan(),
                (CurvatureSign::Negative, Some(k)) => (0.5 * k * rho).tanh(),
                _ => rho,
            },
            (None, None) => unreachable!("untabulated metrics are constant"),
        };
        if self.inner.table.is_none() && s >= self.inner.s_max {
            return Err(domain(format!("rho = {rho} maps to the chart boundary")));
        }
        Ok(s)
    }

    /// `G(ρ) = h(g(ρ))·g(ρ)`.
    pub fn metric_g(&self, rho: f64) -> Result<f64> {
        let s = self.inverse_distance(rho)?;
        Ok(self.density(s) * s)
    }

    /// `½ d(G²)/dρ = g(ρ)[h(g(ρ)) + h′(g(ρ))g(ρ)]`.
    pub fn half_dg2(&self, rho: f64) -> Result<f64> {
        let s = self.inverse_distance(rho)?;
        Ok(s * (self.density(s) + self.density_derivative(s) * s))
    }

    /// `K = −△log h / h²` at chart radius `s`, by 5-point centered
    /// differences of `log h` (evenly extended through `s = 0`).
    pub fn gaussian_curvature(&self, s: f64) -> Result<f64> {
        let s_max = self.inner.s_max;
        if !(s >= 1e-8 && s < s_max) {
            return Err(domain(format!(
                "curvature needs 1e-8 <= s < {s_max}, got {s}"
            )));
        }
        let step = (0.25 * (s_max - s)).min(1e-3);
        if step < 1e-5 {
            return Err(domain(format!(
                "s = {s} is too close to the chart boundary {s_max}"
            )));
        }
        let density = &self.inner.density;
        let log_h = |x: f64| density.value(x.abs()).ln();
        let (d1, d2) = central_derivatives(log_h, s, step);
        let h = density.value(s);
        Ok(-(d2 + d1 / s) / (h * h))
    }

    /// Tightest bound of the form `−κ²`, `0` or `+κ²` above the curvature
    /// sampled at 400 chart radii plus one just inside the chart boundary.
    pub fn infer_bound(&self) -> CurvatureBound {
        if let Some(b) = self.model_bound() {
            return b;
        }
        let s_max = self.inner.s_max;
        let edge = s_max - 1e-4 * s_max.min(1.0);
        let sup = (1..400)
            .map(|k| s_max * k as f64 / 400.0)
            .chain(std::iter::once(edge))
            .filter_map(|s| self.gaussian_curvature(s).ok())
            .fold(f64::NEG_INFINITY, f64::max);
        if sup.abs() <= 1e-6 || !sup.is_finite() {
            CurvatureBound::zero()
        } else if sup < 0.0 {
            CurvatureBound::negative((-sup).sqrt()).unwrap()
        } else {
            CurvatureBound::positive(sup.sqrt()).unwrap()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn enneper() -> RotMetric {
        RotMetric::from_density(
            "enneper",
            Density::power_sum(vec![(1.0, 0), (1.0, 2)]).unwrap(),
            Some(1.0 - 1e-6),
        )
        .unwrap()
    }

    #[test]
    fn constant_metric_distances() {
        let neg = RotMetric::constant(CurvatureBound::negative(1.0).unwrap());
        assert_relative_eq!(
            neg.distance(0.5).unwrap(),
            1.0986122886681098,
            epsilon = 1e-15
        );
        let pos = RotMetric::constant(CurvatureBound::positive(2.0).unwrap());
        assert_relative_eq!(pos.distance(1.0).unwrap(), PI / 4.0, epsilon = 1e-15);
        assert_eq!(RotMetric::flat().distance(0.3).unwrap(), 0.3);
        assert!(neg.distance(1.0).is_err());
        assert!(pos.inverse_distance(PI / 2.0).is_err());
    }

    #[test]
    fn metric_g_examples() {
        assert_relative_eq!(RotMetric::flat().metric_g(0.7).unwrap(), 0.7);
        let neg = RotMetric::constant(CurvatureBound::negative(1.0).unwrap());
        assert_relative_eq!(neg.metric_g(1.0).unwrap(), 1f64.sinh(), epsilon = 1e-14);
        assert_relative_eq!(
            enneper().metric_g(0.9 + 0.243).unwrap(),
            1.81 * 0.9,
            max_relative = 1e-9
        );
        assert_relative_eq!(enneper().metric_g(1.0).unwrap(), {
            let s = enneper().inverse_distance(1.0).unwrap();
            (1.0 + s * s) * s
        });
    }

    #[test]
    fn flat_curvature_vanishes_and_enneper_is_negative() {
        assert!(RotMetric::flat().gaussian_curvature(0.5).unwrap().abs() < 1e-12);
        let k = enneper().gaussian_curvature(0.5).unwrap();
        assert_relative_eq!(k, -4.0 / 1.25f64.powi(4), max_relative = 1e-8);
        assert!(enneper().gaussian_curvature(0.0).is_err());
    }

    #[test]
    fn inferred_bound_covers_enneper() {
        let b = enneper().infer_bound();
        assert_eq!(b.sign(), CurvatureSign::Negative);
        assert_relative_eq!(b.kappa().unwrap(), 0.5, max_relative = 1e-3);
    }

    #[test]
    fn round_trip_on_log_spaced_radii() {
        let m = enneper();
        for k in 0..40 {
            let s = 10f64.powf(-6.0 + 6.0 * k as f64 / 40.0) * 0.999;
            let back = m.inverse_distance(m.distance(s).unwrap()).unwrap();
            assert!(
                (back - s).abs() <= 1e-12 * s.max(1e-3),
                "s = {s}, back = {back}"
            );
        }
    }

    #[test]
    fn inverse_slope_identity_holds_at_knots() {
        let m = enneper();
        for k in 1..50 {
            let rho = m.distance_range() * k as f64 / 50.0;
            let e = 1e-6;
            let gp = (m.inverse_distance(rho + e).unwrap() - m.inverse_distance(rho - e).unwrap())
                / (2.0 * e);
            let s = m.inverse_distance(rho).unwrap();
            assert_relative_eq!(gp * m.density(s), 1.0, epsilon = 1e-7);
        }
    }
}
