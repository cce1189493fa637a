//! Tabulated distance profile `d(s) = ∫₀ˢ h` and its inverse.

use super::density::Density;
use crate::numeric::{adaptive_simpson, hermite};

pub const DEFAULT_KNOTS: usize = 4096;

#[derive(Debug, Clone)]
pub struct DistanceTable {
    s: Vec<f64>,
    d: Vec<f64>,
    h: Vec<f64>,
}

impl DistanceTable {
    /// Knots cluster at both ends of `[0, s_max]` (cosine spacing).
    pub fn build(density: &Density, s_max: f64, knots: usize) -> Self {
        let n = knots.max(16);
        let s: Vec<f64> = (0..=n)
            .map(|k| {
                let u = k as f64 / n as f64;
                0.5 * s_max * (1.0 - (std::f64::consts::PI * u).cos())
            })
            .collect();
        let h: Vec<f64> = s.iter().map(|&x| density.value(x)).collect();
        let f = |x: f64| density.value(x);
        let mut d = Vec::with_capacity(s.len());
        let mut acc = 0.0;
        d.push(0.0);
        for w in s.windows(2) {
            acc += adaptive_simpson(&f, w[0], w[1], 1e-15 * (w[1] - w[0]).max(1e-300));
            d.push(acc);
        }
        Self { s, d, h }
    }

    pub fn s_max(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn d_max(&self) -> f64 {
        *self.d.last().unwrap()
    }

    pub fn distance(&self, x: f64) -> f64 {
        let n = self.s.len();
        let i = self
            .s
            .partition_point(|&v| v <= x)
            .saturating_sub(1)
            .min(n - 2);
        hermite(
            self.s[i],
            self.s[i + 1],
            self.d[i],
            self.d[i + 1],
            self.h[i],
            self.h[i + 1],
            x,
        )
        .0
    }

    /// Inverse by Hermite interpolation with slopes `1/h`, polished by Newton
    /// steps against the forward table.
    pub fn inverse(&self, rho: f64, density: &Density) -> f64 {
        let n = self.d.len();
        let i = self
            .d
            .partition_point(|&v| v <= rho)
            .saturating_sub(1)
            .min(n - 2);
        let mut x = hermite(
            self.d[i],
            self.d[i + 1],
            self.s[i],
            self.s[i + 1],
            1.0 / self.h[i],
            1.0 / self.h[i + 1],
            rho,
        )
        .0;
        for _ in 0..2 {
            let hx = density.value(x);
            if hx > 0.0 {
                x -= (self.distance(x) - rho) / hx;
            }
        }
        x.clamp(0.0, self.s_max())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_density_is_integrated_exactly() {
        let d = Density::power_sum(vec![(1.0, 0), (1.0, 2)]).unwrap();
        let t = DistanceTable::build(&d, 1.0, 1024);
        for s in [0.0, 0.1, 0.5, 0.77, 1.0] {
            assert_relative_eq!(t.distance(s), s + s * s * s / 3.0, epsilon = 1e-14);
        }
        assert_relative_eq!(t.inverse(0.5 + 0.125 / 3.0, &d), 0.5, epsilon = 1e-13);
    }
}
