//! Upper curvature bounds and the model-space comparison functions.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};

/// Relative slack allowed when a radius sits exactly on the cap `π/(2κ)`.
const CAP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureSign {
    Negative,
    Zero,
    Positive,
}

impl fmt::Display for CurvatureSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurvatureSign::Negative => "negative",
            CurvatureSign::Zero => "zero",
            CurvatureSign::Positive => "positive",
        })
    }
}

/// Upper bound `sup K ≤ c` on the Gaussian curvature, with `c ∈ {−κ², 0, +κ²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoundRepr", into = "BoundRepr")]
pub struct CurvatureBound {
    sign: CurvatureSign,
    kappa: f64,
}

#[derive(Serialize, Deserialize)]
struct BoundRepr {
    sign: CurvatureSign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
}

impl TryFrom<BoundRepr> for CurvatureBound {
    type Error = crate::Error;

    fn try_from(r: BoundRepr) -> Result<Self> {
        CurvatureBound::new(r.sign, r.kappa)
    }
}

impl From<CurvatureBound> for BoundRepr {
    fn from(b: CurvatureBound) -> Self {
        BoundRepr {
            sign: b.sign,
            kappa: b.kappa(),
        }
    }
}

impl CurvatureBound {
    /// `kappa` must be a positive finite number unless `sign` is zero, in
    /// which case it is ignored.
    pub fn new(sign: CurvatureSign, kappa: Option<f64>) -> Result<Self> {
        match sign {
            CurvatureSign::Zero => Ok(Self::zero()),
            _ => {
                let k = kappa.ok_or_else(|| invalid(format!("{sign} bound needs kappa")))?;
                if !(k > 0.0 && k.is_finite()) {
                    return Err(invalid(format!(
                        "kappa must be positive and finite, got {k}"
                    )));
                }
                Ok(Self { sign, kappa: k })
            }
        }
    }

    pub fn zero() -> Self {
        Self {
            sign: CurvatureSign::Zero,
            kappa: 0.0,
        }
    }

    pub fn negative(kappa: f64) -> Result<Self> {
        Self::new(CurvatureSign::Negative, Some(kappa))
    }

    pub fn positive(kappa: f64) -> Result<Self> {
        Self::new(CurvatureSign::Positive, Some(kappa))
    }

    pub fn sign(&self) -> CurvatureSign {
        self.sign
    }

    /// `None` for the zero bound.
    pub fn kappa(&self) -> Option<f64> {
        (self.sign != CurvatureSign::Zero).then_some(self.kappa)
    }

    /// The signed curvature value `c` (`−κ²`, `0` or `κ²`).
    pub fn curvature(&self) -> f64 {
        match self.sign {
            CurvatureSign::Negative => -self.kappa * self.kappa,
            CurvatureSign::Zero => 0.0,
            CurvatureSign::Positive => self.kappa * self.kappa,
        }
    }

    /// Largest admissible geodesic radius `π/(2κ)` for a positive bound.
    pub fn cap_radius(&self) -> Option<f64> {
        (self.sign == CurvatureSign::Positive).then(|| FRAC_PI_2 / self.kappa)
    }

    pub(crate) fn within_cap(&self, rho: f64) -> bool {
        self.cap_radius()
            .is_none_or(|cap| rho <= cap * (1.0 + CAP_SLACK))
    }

    /// Hessian comparison function `h_c(r)`: `√c·cot(√c r)`, `1/r` or
    /// `√−c·coth(√−c r)`.
    pub fn h_c(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(domain(format!("h_c needs r > 0, got {r}")));
        }
        let k = self.kappa;
        match self.sign {
            CurvatureSign::Zero => Ok(1.0 / r),
            CurvatureSign::Negative => Ok(k / (k * r).tanh()),
            CurvatureSign::Positive => {
                let x = k * r;
                if x >= std::f64::consts::PI {
                    return Err(domain(format!(
                        "h_c: r = {r} is at or past the cot pole π/κ"
                    )));
                }
                Ok(k * x.cos() / x.sin())
            }
        }
    }

    /// Coefficient `ψ(ρ)` of the Laplacian lower bound `△ρ ≥ ψ(ρ)|∇θ|²`:
    /// `sinh(κρ)/κ`, `ρ` or `sin(κρ)/κ`.
    pub fn psi_small(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(domain(format!("psi needs rho >= 0, got {rho}")));
        }
        if !self.within_cap(rho) {
            return Err(domain(format!(
                "rho = {rho} exceeds the cap radius π/(2κ) = {}",
                self.cap_radius().unwrap_or(f64::INFINITY)
            )));
        }
        let k = self.kappa;
        Ok(match self.sign {
            CurvatureSign::Zero => rho,
            CurvatureSign::Negative => (k * rho).sinh() / k,
            CurvatureSign::Positive => (k * rho).sin() / k,
        })
    }

    /// Main-inequality constant `Ψ = ψ(ρ₁)/(2ρ₁)`.
    pub fn psi_big(&self, rho1: f64) -> Result<f64> {
        if !(rho1 > 0.0 && rho1.is_finite()) {
            return Err(domain(format!("Psi needs rho1 > 0, got {rho1}")));
        }
        if let Some(cap) = self.cap_radius() {
            if rho1 >= cap {
                return Err(domain(format!(
                    "rho1 = {rho1} must be below π/(2κ) = {cap}"
                )));
            }
        }
        let x = self.kappa * rho1;
        Ok(match self.sign {
            CurvatureSign::Zero => 0.5,
            CurvatureSign::Negative => 0.5 * sinhc(x),
            CurvatureSign::Positive => 0.5 * sinc(x),
        })
    }

    /// `Ĝ(ρ)` of the constant-curvature model space.
    pub fn model_g(&self, rho: f64) -> f64 {
        let k = self.kappa;
        match self.sign {
            CurvatureSign::Zero => rho,
            CurvatureSign::Negative => (k * rho).sinh() / k,
            CurvatureSign::Positive => (k * rho).sin() / k,
        }
    }

    /// `½ dĜ²/dρ = h_c(ρ)·Ĝ²(ρ)`: the coefficient for which radial harmonic
    /// maps into the model space attain equality in the Laplacian bound.
    pub fn sharp_coefficient(&self, rho: f64) -> f64 {
        let k = self.kappa;
        match self.sign {
            CurvatureSign::Zero => rho,
            CurvatureSign::Negative => (2.0 * k * rho).sinh() / (2.0 * k),
            CurvatureSign::Positive => (2.0 * k * rho).sin() / (2.0 * k),
        }
    }
}

impl fmt::Display for CurvatureBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kappa() {
            None => write!(f, "K ≤ 0"),
            Some(k) if self.sign == CurvatureSign::Negative => write!(f, "K ≤ -{k}²"),
            Some(k) => write!(f, "K ≤ {k}²"),
        }
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
