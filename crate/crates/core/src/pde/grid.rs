use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Log-polar grid on `r₁ ≤ |z| ≤ r₂`: `r_i = r₁(r₂/r₁)^{i/(nR−1)}`,
/// `θ_j = 2πj/nθ`, periodic in `θ`. Nodes are stored row-major by radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusGrid {
    r1: f64,
    r2: f64,
    nr: usize,
    ntheta: usize,
}

impl AnnulusGrid {
    pub const MIN_NR: usize = 16;
    pub const MIN_NTHETA: usize = 32;

    pub fn new(r1: f64, r2: f64, nr: usize, ntheta: usize) -> Result<Self> {
        if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
            return Err(invalid(format!("need 0 < r1 < r2, got {r1}, {r2}")));
        }
        if nr < Self::MIN_NR || ntheta < Self::MIN_NTHETA {
            return Err(invalid(format!(
                "grid needs nR >= {} and nTheta >= {}, got {nr} x {ntheta}",
                Self::MIN_NR,
                Self::MIN_NTHETA
            )));
        }
        Ok(Self { r1, r2, nr, ntheta })
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn len(&self) -> usize {
        self.nr * self.ntheta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `log(r₂/r₁)`.
    pub fn modulus(&self) -> f64 {
        (self.r2 / self.r1).ln()
    }

    pub fn ht(&self) -> f64 {
        self.modulus() / (self.nr - 1) as f64
    }

    pub fn htheta(&self) -> f64 {
        2.0 * PI / self.ntheta as f64
    }

    /// Largest spacing in `(log r, θ)`.
    pub fn h(&self) -> f64 {
        self.ht().max(self.htheta())
    }

    /// Discretization tolerance `10·h²`.
    pub fn eps_grid(&self) -> f64 {
        10.0 * self.h() * self.h()
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    pub fn t(&self, i: usize) -> f64 {
        if i + 1 == self.nr {
            self.modulus()
        } else {
            i as f64 * self.ht()
        }
    }

    pub fn r(&self, i: usize) -> f64 {
        if i + 1 == self.nr {
            self.r2
        } else {
            self.r1 * self.t(i).exp()
        }
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.htheta()
    }

    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.r(i), self.theta(j))
    }
}
