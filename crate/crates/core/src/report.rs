//! Bound reports: both sides of `ρ₂/ρ₁ ≥ Ψ·Mod² + 1` and the end-to-end
//! verification pipeline.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::metric::{CurvatureBound, GeodesicAnnulus, RotMetric};
use crate::modulus::{angular_energy, modulus_circular};
use crate::pde::{
    green_chain, laplacian_bound_check, max_harmonicity_residual, solve_dirichlet_with,
    AnnulusGrid, AnnulusMap, Orientation, SolverConfig,
};
use crate::radial::{solve_bvp, BvpOutcome};

/// Tolerance for arithmetic-only reports.
pub const REPORT_TOL: f64 = 1e-6;
/// Required harmonicity of a map before its diagnostics are trusted.
pub const HARMONICITY_TOL: f64 = 1e-6;
/// Tolerance of the discrete Green identity.
pub const GREEN_TOL: f64 = 1e-6;
/// Circles used for the Green's-formula chain.
pub const GREEN_RADII: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A named diagnostic with signed margin: it passes when
/// `margin ≥ −tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl SubCheck {
    pub fn new(
        name: impl Into<String>,
        margin: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            margin,
            tolerance,
            pass: margin >= -tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON of the inputs.
    pub config_hash: String,
    pub grid: Option<String>,
    pub solver: Option<String>,
    pub residual_history: Vec<f64>,
    pub eps_grid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "mod")]
    pub modulus: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub psi_big: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    /// Require `margin > 0` instead of `margin ≥ −tolerance`.
    pub strict: bool,
    pub bound: CurvatureBound,
    pub subchecks: Vec<SubCheck>,
    pub provenance: Provenance,
}

impl BoundReport {
    /// Whether the main inequality holds, ignoring sub-checks.
    pub fn main_pass(&self) -> bool {
        if self.strict {
            self.margin > 0.0
        } else {
            self.margin >= -self.tolerance
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Recompute the verdict from the margin and the sub-checks.
    pub fn finalize(&mut self) {
        let ok = self.main_pass() && self.subchecks.iter().all(|c| c.pass);
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    }

    pub fn failed_subchecks(&self) -> Vec<&SubCheck> {
        self.subchecks.iter().filter(|c| !c.pass).collect()
    }
}

pub(crate) fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).unwrap_or_default();
    hex::encode(Sha256::digest(&json))
}

/// Pure arithmetic report of both sides of the main inequality.
pub fn check_bound(
    bound: &CurvatureBound,
    rho1: f64,
    rho2: f64,
    modulus: f64,
) -> Result<BoundReport> {
    GeodesicAnnulus::new(rho1, rho2, *bound)?;
    if !(modulus > 0.0 && modulus.is_finite()) {
        return Err(invalid(format!(
            "modulus must be positive and finite, got {modulus}"
        )));
    }
    let psi_big = bound.psi_big(rho1)?;
    let lhs = rho2 / rho1;
    let rhs = psi_big * modulus * modulus + 1.0;
    #[derive(Serialize)]
    struct Inputs<'a> {
        bound: &'a CurvatureBound,
        rho1: f64,
        rho2: f64,
        modulus: f64,
    }
    let mut report = BoundReport {
        modulus,
        rho1,
        rho2,
        psi_big,
        lhs,
        rhs,
        margin: lhs - rhs,
        verdict: Verdict::Fail,
        tolerance: REPORT_TOL,
        strict: false,
        bound: *bound,
        subchecks: Vec::new(),
        provenance: Provenance {
            config_hash: config_hash(&Inputs {
                bound,
                rho1,
                rho2,
                modulus,
            }),
            ..Provenance::default()
        },
    };
    report.finalize();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    /// Newton–Krylov solve of the grid equations.
    #[default]
    Grid,
    /// Radial shooting, embedded on the grid.
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub r1: f64,
    pub r2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub nr: usize,
    pub ntheta: usize,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub orientation: Orientation,
}

/// Build or solve the harmonic map, run every diagnostic and emit the
/// report. The report fails if any sub-check fails.
pub fn verify_end_to_end(metric: &RotMetric, p: &VerifyParams) -> Result<BoundReport> {
    let bound = metric.bound();
    GeodesicAnnulus::new(p.rho1, p.rho2, bound)?;
    let grid = AnnulusGrid::new(p.r1, p.r2, p.nr, p.ntheta)?;
    let modulus = modulus_circular(p.r1, p.r2)?;
    let eps = grid.eps_grid();

    let mut subchecks = Vec::new();
    let mut history = Vec::new();
    let (map, solver_desc) = match p.solver {
        SolverChoice::Radial => {
            let profile = match solve_bvp(metric, p.rho1, p.rho2, modulus)? {
                BvpOutcome::Solved(pr) => pr,
                BvpOutcome::NoSolution { critical_outer } => {
                    return Err(Error::NoSolution { critical_outer })
                }
            };
            history.push(profile.residual);
            let map = AnnulusMap::from_radial(grid, metric.clone(), &profile)?;
            (
                map,
                format!("radial shooting, slope0 = {:.12e}", profile.slope0),
            )
        }
        SolverChoice::Grid => {
            let cfg = SolverConfig::default();
            let (map, rep) =
                solve_dirichlet_with(grid, metric, p.rho1, p.rho2, p.orientation, &cfg)?;
            history = rep.residual_history.clone();
            subchecks.push(SubCheck::new(
                "solver_converged",
                if rep.converged { 0.0 } else { -1.0 },
                0.0,
                format!(
                    "{} Newton steps, final residual {:.3e}",
                    rep.iterations,
                    rep.final_residual()
                ),
            ));
            let map = match p.orientation {
                Orientation::InnerToInner => map,
                Orientation::InnerToOuter => map.precompose_inversion()?,
            };
            (map, format!("newton-krylov, {} iterations", rep.iterations))
        }
    };

    let res = max_harmonicity_residual(&map)?;
    subchecks.push(SubCheck::new(
        "harmonicity",
        HARMONICITY_TOL - res,
        0.0,
        format!("max residual {res:.3e}"),
    ));
    let homeo = map.is_homeomorphic() && map.rho()[0] < map.rho()[map.rho().len() - 1];
    subchecks.push(SubCheck::new(
        "homeomorphic",
        if homeo { 0.0 } else { -1.0 },
        0.0,
        "winding one, positive Jacobian, inner circle to inner circle",
    ));

    let lap = laplacian_bound_check(&map, &bound)?;
    subchecks.push(SubCheck::new(
        "laplacian_bound",
        lap.min_margin,
        eps,
        format!("min of Δρ − ψ(ρ)|∇θ|² = {:.3e}", lap.min_margin),
    ));

    let energy = angular_energy(&map);
    let floor = 2.0 * PI * modulus;
    subchecks.push(SubCheck::new(
        "angular_energy",
        energy - floor,
        eps,
        format!("∫|∇θ|² = {energy:.9} vs 2π·Mod = {floor:.9}"),
    ));

    for k in 1..=GREEN_RADII {
        let sigma = if k == GREEN_RADII {
            p.r2
        } else {
            p.r1 * (k as f64 * modulus / GREEN_RADII as f64).exp()
        };
        let gc = green_chain(&map, sigma, &bound)?;
        if k == 1 {
            subchecks.push(SubCheck::new(
                "inner_flux",
                gc.inner_flux,
                eps,
                format!("∫ ∂ρ/∂n on |z| = r1: {:.3e}", gc.inner_flux),
            ));
        }
        subchecks.push(SubCheck::new(
            format!("green_identity[{k}]"),
            GREEN_TOL - gc.identity_defect,
            0.0,
            format!("sigma = {sigma:.6}, defect {:.3e}", gc.identity_defect),
        ));
        subchecks.push(SubCheck::new(
            format!("green_chain[{k}]"),
            gc.chain_margin,
            eps,
            format!(
                "flux {:.9} vs 2πψ(ρ1)log(σ/r1) = {:.9}",
                gc.flux, gc.chain_lower
            ),
        ));
    }

    let psi1 = bound.psi_small(p.rho1)?;
    let lhs = 2.0 * PI * (p.rho2 - p.rho1);
    let rhs = PI * psi1 * modulus * modulus;
    subchecks.push(SubCheck::new(
        "greens_formula_inequality",
        lhs - rhs,
        eps,
        format!("2π(ρ2 − ρ1) = {lhs:.9} vs πψ(ρ1)Mod² = {rhs:.9}"),
    ));

    let mut report = check_bound(&bound, p.rho1, p.rho2, modulus)?;
    report.tolerance = eps;
    report.subchecks = subchecks;
    #[derive(Serialize)]
    struct Inputs<'a> {
        metric: &'a str,
        bound: CurvatureBound,
        params: &'a VerifyParams,
    }
    report.provenance = Provenance {
        config_hash: config_hash(&Inputs {
            metric: metric.name(),
            bound,
            params: p,
        }),
        grid: Some(format!("log-polar {}x{}", p.nr, p.ntheta)),
        solver: Some(solver_desc),
        residual_history: history,
        eps_grid: Some(eps),
    };
    report.finalize();
    Ok(report)
}
