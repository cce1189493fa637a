//! Pointwise and integral diagnostics on discrete maps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::map::AnnulusMap;
use crate::error::{invalid, Result};
use crate::metric::CurvatureBound;
use crate::numeric::{lagrange_eval, GAUSS3};

/// Margins `△ρ − ψ(ρ)|∇θ|²` on interior nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplacianCheck {
    /// Row-major over interior rows `1..nR−1`.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub max_abs_margin: f64,
    pub eps_grid: f64,
    pub pass: bool,
}

pub fn laplacian_bound_check(f: &AnnulusMap, bound: &CurvatureBound) -> Result<LaplacianCheck> {
    laplacian_check_with(f, |rho| bound.psi_small(rho))
}

/// Same check against an arbitrary coefficient `c(ρ)` in place of `ψ`.
pub fn laplacian_check_with<C>(f: &AnnulusMap, coeff: C) -> Result<LaplacianCheck>
where
    C: Fn(f64) -> Result<f64>,
{
    let g = f.grid();
    let (nr, nt) = (g.nr(), g.ntheta());
    let dr = f.rho_partials();
    let dth = f.theta_partials();
    let mut margins = Vec::with_capacity((nr - 2) * nt);
    for i in 1..nr - 1 {
        let r2 = g.r(i).powi(2);
        for j in 0..nt {
            let k = g.idx(i, j);
            let lap = dr[k].tt + dr[k].pp;
            let grad2 = dth[k].t * dth[k].t + dth[k].p * dth[k].p;
            margins.push((lap - coeff(f.rho()[k])? * grad2) / r2);
        }
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let max_abs_margin = margins.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let eps_grid = g.eps_grid();
    Ok(LaplacianCheck {
        margins,
        min_margin,
        max_abs_margin,
        eps_grid,
        pass: min_margin >= -eps_grid,
    })
}

/// Green's formula for `ρ` on `r₁ ≤ |z| ≤ σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenChain {
    pub sigma: f64,
    /// `∫_{|z|=σ} ∂ρ/∂n |dz|`.
    pub flux: f64,
    pub inner_flux: f64,
    /// `∫∫ △ρ dμ` over `r₁ ≤ |z| ≤ σ`.
    pub area: f64,
    /// `|flux − inner_flux − area|`.
    pub identity_defect: f64,
    /// `2π ψ(ρ₁) log(σ/r₁)`.
    pub chain_lower: f64,
    pub chain_margin: f64,
    /// `σ` is not a grid radius; values come from interpolation.
    pub interpolated: bool,
}

const LAGRANGE_POINTS: usize = 7;

fn window(n: usize, x: f64, h: f64) -> usize {
    let centre = (x / h).round() as isize - (LAGRANGE_POINTS as isize / 2);
    centre.clamp(0, (n - LAGRANGE_POINTS) as isize) as usize
}

fn local_interp(ts: &[f64], ys: &[f64], h: f64, x: f64) -> (f64, f64) {
    let s = window(ts.len(), x, h);
    lagrange_eval(&ts[s..s + LAGRANGE_POINTS], &ys[s..s + LAGRANGE_POINTS], x)
}

pub fn green_chain(f: &AnnulusMap, sigma: f64, bound: &CurvatureBound) -> Result<GreenChain> {
    let g = f.grid();
    let (nr, nt) = (g.nr(), g.ntheta());
    if !(sigma > g.r1() && sigma <= g.r2() * (1.0 + 1e-12)) {
        return Err(invalid(format!(
            "sigma = {sigma} outside ({}, {}]",
            g.r1(),
            g.r2()
        )));
    }
    let ts: Vec<f64> = (0..nr).map(|i| g.t(i)).collect();
    let ht = g.ht();
    let hp = g.htheta();
    let t_sigma = (sigma / g.r1()).ln().min(g.modulus());

    let mean: Vec<f64> = (0..nr)
        .map(|i| f.rho()[i * nt..(i + 1) * nt].iter().sum::<f64>() / nt as f64)
        .collect();
    // Ring integrals of △ρ: the angular part from the periodic stencil, the
    // radial part as 2π·(mean)″ from the same local interpolants as the flux.
    let d = f.rho_partials();
    let ring_pp: Vec<f64> = (0..nr)
        .map(|i| (0..nt).map(|j| d[g.idx(i, j)].pp).sum::<f64>() * hp)
        .collect();
    let mean_t: Vec<f64> = ts
        .iter()
        .map(|&x| local_interp(&ts, &mean, ht, x).1)
        .collect();
    let ring = |x: f64| {
        2.0 * PI * local_interp(&ts, &mean_t, ht, x).1 + local_interp(&ts, &ring_pp, ht, x).0
    };

    let flux = 2.0 * PI * local_interp(&ts, &mean, ht, t_sigma).1;
    let inner_flux = 2.0 * PI * local_interp(&ts, &mean, ht, 0.0).1;

    let mut area = 0.0;
    let mut a = 0.0;
    while a < t_sigma {
        let b = (a + ht).min(t_sigma);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, w) in GAUSS3 {
            area += w * half * ring(mid + half * x);
        }
        a = b;
        if t_sigma - a < 1e-14 * ht {
            break;
        }
    }

    let rho1 = mean[0];
    let chain_lower = 2.0 * PI * bound.psi_small(rho1)? * t_sigma;
    let nearest = (t_sigma / ht).round() * ht;
    Ok(GreenChain {
        sigma,
        flux,
        inner_flux,
        area,
        identity_defect: (flux - inner_flux - area).abs(),
        chain_lower,
        chain_margin: flux - chain_lower,
        interpolated: (t_sigma - nearest).abs() > 1e-9 * ht,
    })
}
