//! Minimal-surface metrics `(|g′| + |h′|)|dz|` from Weierstrass–Enneper data
//! on the unit disk.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::metric::{CurvatureBound, Density, RotMetric};
use crate::modulus::{capacity_masked, MaskedDomain};
use crate::report::{check_bound, BoundReport, SubCheck};

/// Chart radius cut-off for distances near the unit circle.
pub const DISK_CUTOFF: f64 = 1.0 - 1e-6;

/// A complex polynomial `Σ c_k z^k`, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// `Some((c, k))` if the polynomial is `c z^k` with `c ≠ 0`, or
    /// `Some((0, 0))` if it vanishes.
    fn as_monomial(&self) -> Option<(Complex64, i32)> {
        let nz: Vec<(usize, &Complex64)> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .collect();
        match nz.as_slice() {
            [] => Some((Complex64::default(), 0)),
            [(k, c)] => Some((**c, *k as i32)),
            _ => None,
        }
    }
}

/// Derivative data `g′, h′` of a harmonic parametrization `g + conj(h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassData {
    pub name: String,
    pub g_prime: Poly,
    pub h_prime: Poly,
    /// Declared rotational symmetry of the density.
    pub symmetric: bool,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl WeierstrassData {
    pub fn new(
        name: impl Into<String>,
        g_prime: Poly,
        h_prime: Poly,
        symmetric: bool,
    ) -> Result<Self> {
        let data = Self {
            name: name.into(),
            g_prime,
            h_prime,
            symmetric,
        };
        for k in 0..64 {
            let z = Complex64::from_polar(0.999 * (k % 8) as f64 / 8.0, k as f64 * 0.7);
            if !(data.density_unchecked(z) > 0.0) {
                return Err(invalid(format!(
                    "density of '{}' vanishes at {z}",
                    data.name
                )));
            }
        }
        Ok(data)
    }

    pub fn catalog() -> Vec<WeierstrassData> {
        let entries = [
            ("planar", vec![c(1.0, 0.0)], vec![], true),
            (
                "enneper",
                vec![c(1.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
                true,
            ),
            (
                "enneper-rotated",
                vec![c(1.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
                true,
            ),
            (
                "enneper-scaled",
                vec![c(2.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
                true,
            ),
            // 0.5 (z − 0.3)²
            (
                "enneper-shifted",
                vec![c(1.0, 0.0)],
                vec![c(0.045, 0.0), c(-0.3, 0.0), c(0.5, 0.0)],
                false,
            ),
        ];
        entries
            .into_iter()
            .map(|(n, g, h, s)| WeierstrassData::new(n, Poly(g), Poly(h), s).unwrap())
            .collect()
    }

    pub fn catalog_names() -> Vec<String> {
        Self::catalog().into_iter().map(|w| w.name).collect()
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Self::catalog()
            .into_iter()
            .find(|w| w.name == name)
            .ok_or_else(|| {
                invalid(format!(
                    "unknown surface '{name}'; known: {}",
                    Self::catalog_names().join(", ")
                ))
            })
    }

    pub fn is_planar(&self) -> bool {
        self.h_prime.0.iter().all(|c| c.norm() == 0.0)
            && self.g_prime.0.iter().skip(1).all(|c| c.norm() == 0.0)
    }

    fn density_unchecked(&self, z: Complex64) -> f64 {
        self.g_prime.eval(z).norm() + self.h_prime.eval(z).norm()
    }

    /// `℘(z) = |g′(z)| + |h′(z)|`.
    pub fn density(&self, z: Complex64) -> Result<f64> {
        if !(z.norm() < 1.0) {
            return Err(domain(format!(
                "|z| = {} is outside the unit disk",
                z.norm()
            )));
        }
        Ok(self.density_unchecked(z))
    }

    /// `∂_z ℘ = ½(g″·conj(g′)/|g′| + h″·conj(h′)/|h′|)`.
    fn density_dz(&self, z: Complex64) -> Complex64 {
        let term = |p: &Poly| {
            let v = p.eval(z);
            let n = v.norm();
            if n < 1e-300 {
                Complex64::default()
            } else {
                p.derivative().eval(z) * v.conj() / n
            }
        };
        (term(&self.g_prime) + term(&self.h_prime)) * 0.5
    }

    /// Declared symmetry confirmed by `℘(se^{iα})` being constant in `α`.
    pub fn verify_symmetric(&self) -> bool {
        if !self.symmetric {
            return false;
        }
        (1..20).all(|k| {
            let s = k as f64 / 20.0;
            let base = self.density_unchecked(c(s, 0.0));
            (0..32).all(|a| {
                let z = Complex64::from_polar(s, a as f64 * 0.2);
                (self.density_unchecked(z) - base).abs() <= 1e-10 * base.max(1.0)
            })
        })
    }

    fn require_symmetric(&self) -> Result<()> {
        if self.verify_symmetric() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "surface '{}' is not rotationally symmetric",
                self.name
            )))
        }
    }

    /// The rotationally symmetric metric `℘(s)` on `s ≤ 1 − 10⁻⁶`, declared
    /// with the zero curvature bound.
    pub fn rot_metric(&self) -> Result<RotMetric> {
        self.require_symmetric()?;
        let density = match (self.g_prime.as_monomial(), self.h_prime.as_monomial()) {
            (Some((a, p)), Some((b, q))) => {
                let terms: Vec<(f64, i32)> = [(a.norm(), p), (b.norm(), q)]
                    .into_iter()
                    .filter(|(c, _)| *c > 0.0)
                    .collect();
                Density::power_sum(terms)?
            }
            _ => {
                let data = self.clone();
                Density::Custom(std::sync::Arc::new(move |s| {
                    data.density_unchecked(c(s, 0.0))
                }))
            }
        };
        Ok(
            RotMetric::from_density(self.name.clone(), density, Some(DISK_CUTOFF))?
                .with_bound(CurvatureBound::zero()),
        )
    }

    /// `∫₀ˢ ℘(t) dt` along a ray, with `s` clamped to `1 − 10⁻⁶`.
    pub fn distance_radial(&self, s: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&s) {
            return Err(domain(format!("chart radius {s} outside [0, 1)")));
        }
        self.rot_metric()?.distance(s.min(DISK_CUTOFF))
    }

    /// `K = −△log℘/℘²` by fourth-order differences in `x` and `y`.
    pub fn gaussian_curvature(&self, z: Complex64) -> Result<f64> {
        let s = z.norm();
        if !(s < 1.0) {
            return Err(domain("curvature needs |z| < 1"));
        }
        let h = 1e-3 * (1.0 - s).min(1.0);
        if h < 1e-8 {
            return Err(domain("point too close to the unit circle"));
        }
        let lp = |dx: f64, dy: f64| self.density_unchecked(z + c(dx, dy)).ln();
        let f0 = lp(0.0, 0.0);
        let second = |ex: f64, ey: f64| {
            (-lp(2.0 * h * ex, 2.0 * h * ey) + 16.0 * lp(h * ex, h * ey) - 30.0 * f0
                + 16.0 * lp(-h * ex, -h * ey)
                - lp(-2.0 * h * ex, -2.0 * h * ey))
                / (12.0 * h * h)
        };
        let lap = second(1.0, 0.0) + second(0.0, 1.0);
        let p = (f0).exp();
        Ok(-lap / (p * p))
    }
}

/// Free-function form of [`WeierstrassData::density`].
pub fn we_density(w: &WeierstrassData, z: Complex64) -> Result<f64> {
    w.density(z)
}

pub fn we_distance_radial(w: &WeierstrassData, s: f64) -> Result<f64> {
    w.distance_radial(s)
}

/// Sampled geodesic: positions, velocities and `℘`-arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub points: Vec<Complex64>,
    pub velocities: Vec<Complex64>,
    pub arc: Vec<f64>,
}

impl GeodesicPath {
    pub fn end(&self) -> Complex64 {
        *self.points.last().unwrap()
    }

    /// `∫℘(z)|ż| ds` along the samples by composite Simpson.
    pub fn metric_length(&self, w: &WeierstrassData) -> f64 {
        let speed: Vec<f64> = self
            .points
            .iter()
            .zip(&self.velocities)
            .map(|(z, v)| w.density_unchecked(*z) * v.norm())
            .collect();
        let n = speed.len() - 1;
        let h = self.arc[1] - self.arc[0];
        let mut total = speed[0] + speed[n];
        for (k, s) in speed.iter().enumerate().take(n).skip(1) {
            total += if k % 2 == 1 { 4.0 * s } else { 2.0 * s };
        }
        total * h / 3.0
    }
}

pub const GEODESIC_STEPS: usize = 2000;

/// Integrate `z̈ + 2(∂_z log℘)ż² = 0` at unit `℘`-speed from `z0` in
/// direction `dir` for arc length `len`.
pub fn geodesic_shoot(
    w: &WeierstrassData,
    z0: Complex64,
    dir: Complex64,
    len: f64,
) -> Result<GeodesicPath> {
    geodesic_shoot_with(w, z0, dir, len, GEODESIC_STEPS)
}

pub fn geodesic_shoot_with(
    w: &WeierstrassData,
    z0: Complex64,
    dir: Complex64,
    len: f64,
    steps: usize,
) -> Result<GeodesicPath> {
    if !(len > 0.0 && len.is_finite()) || steps < 2 {
        return Err(invalid("geodesic length must be positive and steps >= 2"));
    }
    if !(dir.norm() > 0.0) {
        return Err(invalid("direction must be nonzero"));
    }
    let steps = steps + steps % 2;
    let p0 = w.density(z0)?;
    let v0 = dir / dir.norm() / p0;
    let accel = |z: Complex64, v: Complex64| -> Complex64 {
        let p = w.density_unchecked(z);
        -(w.density_dz(z) / p) * v * v * 2.0
    };
    let h = len / steps as f64;
    let mut points = vec![z0];
    let mut velocities = vec![v0];
    let (mut z, mut v) = (z0, v0);
    for k in 0..steps {
        let k1z = v;
        let k1v = accel(z, v);
        let k2z = v + k1v * (0.5 * h);
        let k2v = accel(z + k1z * (0.5 * h), k2z);
        let k3z = v + k2v * (0.5 * h);
        let k3v = accel(z + k2z * (0.5 * h), k3z);
        let k4z = v + k3v * h;
        let k4v = accel(z + k3z * h, k4z);
        z += (k1z + k2z * 2.0 + k3z * 2.0 + k4z) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        if !(z.norm() < 1.0) {
            return Err(Error::DiskExit {
                at: (k + 1) as f64 * h,
            });
        }
        points.push(z);
        velocities.push(v);
    }
    let arc = (0..=steps).map(|k| k as f64 * h).collect();
    Ok(GeodesicPath {
        points,
        velocities,
        arc,
    })
}

/// Check `ρ₂/ρ₁ > ½·Mod² + 1` for the geodesic annulus around the origin,
/// with `Mod` computed by capacity on an `n × n` Cartesian mask.
pub fn corollary_check(w: &WeierstrassData, rho1: f64, rho2: f64, n: usize) -> Result<BoundReport> {
    let metric = w.rot_metric()?;
    if !(rho1 > 0.0 && rho2 > rho1) {
        return Err(invalid(format!("need 0 < rho1 < rho2, got {rho1}, {rho2}")));
    }
    let top = metric.distance_range();
    if rho2 >= top {
        return Err(invalid(format!(
            "rho2 = {rho2} reaches the unit circle (distance {top})"
        )));
    }
    let s1 = metric.inverse_distance(rho1)?;
    let s2 = metric.inverse_distance(rho2)?;
    let exact = (s2 / s1).ln();
    let mask = MaskedDomain::geodesic(&metric, rho1, rho2, n)?;
    let cap = capacity_masked(&mask)?;
    let mut report = check_bound(&CurvatureBound::zero(), rho1, rho2, cap.modulus)?;
    report.strict = true;
    report.subchecks.push(SubCheck::new(
        "capacity_vs_chart_modulus",
        5e-3 - (cap.modulus - exact).abs(),
        0.0,
        format!(
            "capacity {:.9} vs log(g(rho2)/g(rho1)) {:.9}",
            cap.modulus, exact
        ),
    ));
    report.provenance.grid = Some(format!("cartesian {n}x{n}"));
    report.finalize();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn densities() {
        let p = WeierstrassData::by_name("planar").unwrap();
        let e = WeierstrassData::by_name("enneper").unwrap();
        assert_eq!(we_density(&p, c(0.3, -0.2)).unwrap(), 1.0);
        assert_relative_eq!(we_density(&e, c(0.5, 0.0)).unwrap(), 1.25);
        assert_relative_eq!(
            we_density(&e, Complex64::from_polar(0.6, 2.0)).unwrap(),
            1.36,
            epsilon = 1e-15
        );
        assert!(we_density(&e, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn radial_distances() {
        let p = WeierstrassData::by_name("planar").unwrap();
        let e = WeierstrassData::by_name("enneper").unwrap();
        assert_relative_eq!(we_distance_radial(&p, 0.7).unwrap(), 0.7, epsilon = 1e-14);
        assert_relative_eq!(
            we_distance_radial(&e, 0.5).unwrap(),
            0.5 + 0.125 / 3.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            we_distance_radial(&e, 1.0 - 1e-12).unwrap(),
            4.0 / 3.0,
            epsilon = 1e-5
        );
        let s = WeierstrassData::by_name("enneper-shifted").unwrap();
        assert!(matches!(
            we_distance_radial(&s, 0.5),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn curvature_of_catalog() {
        let e = WeierstrassData::by_name("enneper").unwrap();
        assert_relative_eq!(
            e.gaussian_curvature(c(0.5, 0.0)).unwrap(),
            -4.0 / 1.25f64.powi(4),
            max_relative = 1e-8
        );
        let p = WeierstrassData::by_name("planar").unwrap();
        assert!(p.gaussian_curvature(c(0.2, 0.3)).unwrap().abs() < 1e-10);
    }

    #[test]
    fn planar_geodesics_are_straight() {
        let p = WeierstrassData::by_name("planar").unwrap();
        let g = geodesic_shoot(&p, c(0.1, 0.1), c(1.0, 1.0), 0.5).unwrap();
        let expect = c(0.1, 0.1) + c(1.0, 1.0) / 2f64.sqrt() * 0.5;
        assert!((g.end() - expect).norm() < 1e-13);
    }

    #[test]
    fn disk_exit_is_an_error() {
        let e = WeierstrassData::by_name("enneper").unwrap();
        assert!(matches!(
            geodesic_shoot(&e, c(0.0, 0.0), c(1.0, 0.0), 2.0),
            Err(Error::DiskExit { .. })
        ));
    }
}
