use serde::{Deserialize, Serialize};

use super::bound::CurvatureBound;
use crate::error::{invalid, Result};

/// Geodesic annulus `ρ₁ < d(p, ·) < ρ₂` around the center of a metric with
/// curvature bounded above by `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicAnnulus {
    rho1: f64,
    rho2: f64,
    bound: CurvatureBound,
}

impl GeodesicAnnulus {
    pub fn new(rho1: f64, rho2: f64, bound: CurvatureBound) -> Result<Self> {
        if !(rho1 > 0.0 && rho1.is_finite() && rho2.is_finite()) {
            return Err(invalid(format!(
                "rho1 must be positive and finite, got {rho1}"
            )));
        }
        if !(rho2 > rho1) {
            return Err(invalid(format!("need rho1 < rho2, got {rho1} and {rho2}")));
        }
        if !bound.within_cap(rho2) {
            return Err(invalid(format!(
                "rho2 = {rho2} exceeds π/(2κ) = {} for a positive curvature bound",
                bound.cap_radius().unwrap()
            )));
        }
        Ok(Self { rho1, rho2, bound })
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn bound(&self) -> CurvatureBound {
        self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let z = CurvatureBound::zero();
        assert!(GeodesicAnnulus::new(0.5, 1.0, z).is_ok());
        assert!(GeodesicAnnulus::new(1.0, 1.0, z).is_err());
        assert!(GeodesicAnnulus::new(0.0, 1.0, z).is_err());
        let pos = CurvatureBound::positive(1.0).unwrap();
        assert!(GeodesicAnnulus::new(0.5, 1.5, pos).is_ok());
        assert!(GeodesicAnnulus::new(0.5, std::f64::consts::FRAC_PI_2, pos).is_ok());
        assert!(GeodesicAnnulus::new(0.5, 1.6, pos).is_err());
    }
}
