use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use super::grid::AnnulusGrid;
use super::stencil::{d1, periodic};
use crate::error::{invalid, Error, Result};
use crate::metric::RotMetric;
use crate::radial::RadialProfile;

/// Discrete map of a grid annulus into a metric, in geodesic polar
/// coordinates `(ρ, θ)` of the target. `θ` is a continuous lift with
/// `θ − arg z` periodic.
#[derive(Debug, Clone)]
pub struct AnnulusMap {
    grid: AnnulusGrid,
    rho: Vec<f64>,
    theta: Vec<f64>,
    metric: RotMetric,
}

/// Local derivatives of a node field with respect to `(t, φ)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Partials<T> {
    pub t: T,
    pub p: T,
    pub tt: T,
    pub pp: T,
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    } else if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

impl AnnulusMap {
    pub fn from_fields(
        grid: AnnulusGrid,
        metric: RotMetric,
        rho: Vec<f64>,
        theta: Vec<f64>,
    ) -> Result<Self> {
        if rho.len() != grid.len() || theta.len() != grid.len() {
            return Err(invalid(format!(
                "field sizes {} and {} do not match the grid ({} nodes)",
                rho.len(),
                theta.len(),
                grid.len()
            )));
        }
        let range = metric.distance_range();
        if let Some(bad) = rho.iter().find(|r| !(**r >= 0.0 && **r < range)) {
            return Err(invalid(format!(
                "rho = {bad} outside the metric's distance range"
            )));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(invalid("theta field must be finite"));
        }
        let map = Self {
            grid,
            rho,
            theta,
            metric,
        };
        map.check_winding()?;
        Ok(map)
    }

    /// Embed `w(z) = g(ρ(log|z/r₁|))·e^{i arg z}`.
    pub fn from_radial(
        grid: AnnulusGrid,
        metric: RotMetric,
        profile: &RadialProfile,
    ) -> Result<Self> {
        let t_max = profile.modulus();
        if (t_max - grid.modulus()).abs() > 1e-9 * grid.modulus().max(1.0) {
            return Err(invalid(format!(
                "profile modulus {t_max} differs from the grid modulus {}",
                grid.modulus()
            )));
        }
        let mut rho = Vec::with_capacity(grid.len());
        let mut theta = Vec::with_capacity(grid.len());
        for i in 0..grid.nr() {
            let r = profile.eval(grid.t(i).min(t_max)).0;
            for j in 0..grid.ntheta() {
                rho.push(r);
                theta.push(grid.theta(j));
            }
        }
        Self::from_fields(grid, metric, rho, theta)
    }

    /// Build from chart values `w`, lifting `θ` so that `θ − arg z ∈ (−π, π]`.
    pub fn from_chart(grid: AnnulusGrid, metric: RotMetric, w: &[Complex64]) -> Result<Self> {
        if w.len() != grid.len() {
            return Err(invalid("chart field size does not match the grid"));
        }
        let mut rho = Vec::with_capacity(w.len());
        let mut theta = Vec::with_capacity(w.len());
        for i in 0..grid.nr() {
            for j in 0..grid.ntheta() {
                let v = w[grid.idx(i, j)];
                let phi = grid.theta(j);
                rho.push(metric.distance(v.norm())?);
                theta.push(phi + wrap_angle(v.arg() - phi));
            }
        }
        Self::from_fields(grid, metric, rho, theta)
    }

    pub fn grid(&self) -> &AnnulusGrid {
        &self.grid
    }

    pub fn metric(&self) -> &RotMetric {
        &self.metric
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `θ − arg z`, periodic along every circle.
    pub fn theta_periodic(&self) -> Vec<f64> {
        let g = &self.grid;
        (0..g.len())
            .map(|k| self.theta[k] - g.theta(k % g.ntheta()))
            .collect()
    }

    pub fn chart_values(&self) -> Result<Vec<Complex64>> {
        self.rho
            .iter()
            .zip(&self.theta)
            .map(|(&r, &th)| Ok(Complex64::from_polar(self.metric.inverse_distance(r)?, th)))
            .collect()
    }

    /// Winding number of `θ` along each grid circle.
    pub fn winding_numbers(&self) -> Vec<f64> {
        let g = &self.grid;
        let n = g.ntheta();
        (0..g.nr())
            .map(|i| {
                let total: f64 = (0..n)
                    .map(|j| {
                        let a = self.theta[g.idx(i, j)];
                        let b = self.theta[g.idx(i, (j + 1) % n)];
                        wrap_angle(b - a)
                    })
                    .sum();
                total / (2.0 * PI)
            })
            .collect()
    }

    pub fn check_winding(&self) -> Result<()> {
        for (row, w) in self.winding_numbers().into_iter().enumerate() {
            if (w - 1.0).abs() > 1e-6 {
                return Err(Error::Winding { row, winding: w });
            }
        }
        Ok(())
    }

    /// `(t, φ)` partials of `ρ` at every node.
    pub fn rho_partials(&self) -> Vec<Partials<f64>> {
        partials(&self.grid, &self.rho)
    }

    /// `(t, φ)` partials of `θ` at every node (using the periodic part).
    pub fn theta_partials(&self) -> Vec<Partials<f64>> {
        let mut p = partials(&self.grid, &self.theta_periodic());
        for v in &mut p {
            v.p += 1.0;
        }
        p
    }

    /// Orientation-preserving, inner-to-inner normalization of a map that
    /// sends the inner circle outward: `conj ∘ f ∘ (z ↦ r₁r₂/z)`.
    pub fn precompose_inversion(&self) -> Result<Self> {
        let g = &self.grid;
        let (nr, nt) = (g.nr(), g.ntheta());
        let mut rho = vec![0.0; g.len()];
        let mut theta = vec![0.0; g.len()];
        for i in 0..nr {
            for j in 0..nt {
                let src = g.idx(nr - 1 - i, (nt - j) % nt);
                let dst = g.idx(i, j);
                rho[dst] = self.rho[src];
                let shift = if j == 0 { 0.0 } else { 2.0 * PI };
                // θ(φ) ↦ −θ(−φ); the lift stays continuous by shifting 2π
                theta[dst] = shift - self.theta[src];
            }
        }
        Self::from_fields(*g, self.metric.clone(), rho, theta)
    }

    /// Jacobian determinant `ρ_t θ_φ − ρ_φ θ_t` at every node.
    pub fn polar_jacobian(&self) -> Vec<f64> {
        self.rho_partials()
            .iter()
            .zip(self.theta_partials())
            .map(|(r, th)| r.t * th.p - r.p * th.t)
            .collect()
    }

    /// Winding one on every circle and a Jacobian of constant sign: strict
    /// on interior circles, up to rounding on the two boundary circles
    /// (critical maps are degenerate there).
    pub fn is_homeomorphic(&self) -> bool {
        if self.check_winding().is_err() {
            return false;
        }
        let jac = self.polar_jacobian();
        let nt = self.grid.ntheta();
        let interior = &jac[nt..jac.len() - nt];
        let slack = 1e-6 * jac.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let ends = jac[..nt].iter().chain(&jac[jac.len() - nt..]);
        if interior.iter().all(|&j| j > 0.0) {
            ends.clone().all(|&j| j >= -slack)
        } else if interior.iter().all(|&j| j < 0.0) {
            ends.clone().all(|&j| j <= slack)
        } else {
            false
        }
    }

    /// CSV with columns `r,theta,rho,theta_target`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,theta,rho,theta_target")?;
        let g = &self.grid;
        for i in 0..g.nr() {
            for j in 0..g.ntheta() {
                let k = g.idx(i, j);
                writeln!(
                    out,
                    "{:.17e},{:.17e},{:.17e},{:.17e}",
                    g.r(i),
                    g.theta(j),
                    self.rho[k],
                    self.theta[k]
                )?;
            }
        }
        Ok(())
    }
}

/// Fourth-order `(t, φ)` partials of a periodic node field.
pub fn partials<T>(grid: &AnnulusGrid, f: &[T]) -> Vec<Partials<T>>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let (nr, nt) = (grid.nr(), grid.ntheta());
    let (ht, hp) = (grid.ht(), grid.htheta());
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..nr {
        let s1 = d1(i, nr, ht);
        let s2 = super::stencil::d2(i, nr, ht);
        let row = &f[i * nt..(i + 1) * nt];
        for j in 0..nt {
            let t = s1.apply(|k| f[k * nt + j]);
            let tt = s2.apply(|k| f[k * nt + j]);
            let (p, pp) = periodic(j, nt, hp, |q| row[q]);
            out.push(Partials { t, p, tt, pp });
        }
    }
    out
}
