//! Jacobian-free Newton–Krylov solver for the Dirichlet problem.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::grid::AnnulusGrid;
use super::map::AnnulusMap;
use super::residual::zeta_residual;
use super::stencil::periodic_d2_eigenvalue;
use crate::error::{invalid, Error, Result};
use crate::metric::{GeodesicAnnulus, RotMetric};

/// Which boundary circle of the domain goes to the inner geodesic circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `|z| = r₁ ↦ ρ = ρ₁`.
    #[default]
    InnerToInner,
    /// `|z| = r₁ ↦ ρ = ρ₂`.
    InnerToOuter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop when the largest z-form residual is below this.
    pub tol: f64,
    pub max_newton: usize,
    pub gmres_restart: usize,
    pub max_gmres: usize,
    pub max_halvings: usize,
    /// Consecutive non-decreasing Newton steps treated as divergence.
    pub divergence_window: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_newton: 50,
            gmres_restart: 40,
            max_gmres: 400,
            max_halvings: 30,
            divergence_window: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub linear_iterations: usize,
    /// Largest z-form residual after each Newton step (index 0 is the
    /// initial guess).
    pub residual_history: Vec<f64>,
    pub homeomorphic: bool,
    pub orientation: Orientation,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&f64::NAN)
    }
}

/// Solve the discrete harmonic-map equation with `ρ = ρ₁` on `|z| = r₁`,
/// `ρ = ρ₂` on `|z| = r₂` and `θ = arg z` on both circles.
pub fn solve_dirichlet(
    grid: AnnulusGrid,
    m: &RotMetric,
    rho1: f64,
    rho2: f64,
) -> Result<(AnnulusMap, SolveReport)> {
    solve_dirichlet_with(
        grid,
        m,
        rho1,
        rho2,
        Orientation::InnerToInner,
        &SolverConfig::default(),
    )
}

pub fn solve_dirichlet_with(
    grid: AnnulusGrid,
    m: &RotMetric,
    rho1: f64,
    rho2: f64,
    orientation: Orientation,
    cfg: &SolverConfig,
) -> Result<(AnnulusMap, SolveReport)> {
    GeodesicAnnulus::new(rho1, rho2, m.bound())?;
    let (a, b) = match orientation {
        Orientation::InnerToInner => (rho1, rho2),
        Orientation::InnerToOuter => (rho2, rho1),
    };
    let (map, mut report) = solve_raw(grid, m, a, b, cfg)?;
    report.orientation = orientation;
    Ok((map, report))
}

/// Solver without the annulus precondition; equal boundary radii are
/// accepted and reported as non-homeomorphic.
pub fn solve_raw(
    grid: AnnulusGrid,
    m: &RotMetric,
    rho_inner: f64,
    rho_outer: f64,
    cfg: &SolverConfig,
) -> Result<(AnnulusMap, SolveReport)> {
    let range = m.distance_range();
    for r in [rho_inner, rho_outer] {
        if !(r > 0.0 && r < range) {
            return Err(invalid(format!(
                "boundary radius {r} outside the metric's range"
            )));
        }
    }
    let (nr, nt) = (grid.nr(), grid.ntheta());
    let s_in = m.inverse_distance(rho_inner)?;
    let s_out = m.inverse_distance(rho_outer)?;
    let s_max = m.s_max();

    let mut w = vec![Complex64::default(); grid.len()];
    for i in 0..nr {
        let u = i as f64 / (nr - 1) as f64;
        let s = m.inverse_distance(rho_inner + u * (rho_outer - rho_inner))?;
        let s = match i {
            0 => s_in,
            _ if i + 1 == nr => s_out,
            _ => s,
        };
        for j in 0..nt {
            w[grid.idx(i, j)] = Complex64::from_polar(s, grid.theta(j));
        }
    }

    let scale: Vec<f64> = (0..nr).map(|i| 0.25 / grid.r(i).powi(2)).collect();
    let z_norm = |f: &[Complex64]| -> f64 {
        (0..nr)
            .map(|i| {
                f[i * nt..(i + 1) * nt]
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0, f64::max)
                    * scale[i]
            })
            .fold(0.0, f64::max)
    };

    let precond = Poisson::new(&grid);
    let mut f = vec![Complex64::default(); grid.len()];
    zeta_residual(&grid, m, &w, &mut f);
    let mut res = z_norm(&f);
    let mut history = vec![res];
    let mut iterations = 0;
    let mut linear_iterations = 0;
    let mut growth = 0;
    let mut trial = vec![Complex64::default(); grid.len()];
    let mut f_trial = vec![Complex64::default(); grid.len()];

    while res > cfg.tol && iterations < cfg.max_newton {
        iterations += 1;
        let fnorm = norm2(&f);
        let eta = fnorm.clamp(1e-6, 1e-2);
        let rhs: Vec<Complex64> = f.iter().map(|c| -c).collect();
        let w_inf = w.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut jv_buf = vec![Complex64::default(); grid.len()];
        let mut pert = vec![Complex64::default(); grid.len()];
        let jac = |v: &[Complex64], out: &mut Vec<Complex64>| {
            let v_inf = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
            out.clear();
            if v_inf == 0.0 {
                out.resize(v.len(), Complex64::default());
                return;
            }
            let eps = 1e-7 * (1.0 + w_inf) / v_inf;
            for k in 0..w.len() {
                pert[k] = w[k] + v[k] * eps;
            }
            zeta_residual(&grid, m, &pert, &mut jv_buf);
            out.extend(jv_buf.iter().zip(&f).map(|(a, b)| (a - b) / eps));
        };
        let (delta, its) = gmres(
            jac,
            |v| precond.solve(v),
            &rhs,
            eta,
            cfg.gmres_restart,
            cfg.max_gmres,
        );
        linear_iterations += its;

        let mut lambda = 1.0;
        let mut accepted = false;
        let mut best: Option<(f64, f64)> = None;
        for _ in 0..=cfg.max_halvings {
            let mut inside = true;
            for k in 0..w.len() {
                trial[k] = w[k] + delta[k] * lambda;
                if !(trial[k].norm() < s_max) {
                    inside = false;
                }
            }
            if inside {
                zeta_residual(&grid, m, &trial, &mut f_trial);
                let r = z_norm(&f_trial);
                if r.is_finite() && best.is_none_or(|(_, b)| r < b) {
                    best = Some((lambda, r));
                }
                if r < res {
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((lam, new_res)) = best else {
            return Err(Error::Divergence {
                sweeps: iterations,
                residual: res,
            });
        };
        for k in 0..w.len() {
            w[k] += delta[k] * lam;
        }
        zeta_residual(&grid, m, &w, &mut f);
        growth = if accepted { 0 } else { growth + 1 };
        res = new_res;
        history.push(res);
        if growth >= cfg.divergence_window {
            return Err(Error::Divergence {
                sweeps: growth,
                residual: res,
            });
        }
    }

    let map = AnnulusMap::from_chart(grid, m.clone(), &w)?;
    let homeomorphic = rho_inner != rho_outer
        && map.is_homeomorphic()
        && within_bounds(&map, rho_inner, rho_outer);
    Ok((
        map,
        SolveReport {
            converged: res <= cfg.tol,
            iterations,
            linear_iterations,
            residual_history: history,
            homeomorphic,
            orientation: Orientation::InnerToInner,
        },
    ))
}

fn within_bounds(map: &AnnulusMap, a: f64, b: f64) -> bool {
    let (lo, hi) = (a.min(b), a.max(b));
    let slack = 1e-9 * hi;
    map.rho()
        .iter()
        .all(|&r| r >= lo - slack && r <= hi + slack)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    dot(a, a).sqrt()
}

/// Right-preconditioned restarted GMRES over the real inner product on `ℂⁿ`.
fn gmres<A, P>(
    mut apply: A,
    precond: P,
    b: &[Complex64],
    rel_tol: f64,
    restart: usize,
    max_iter: usize,
) -> (Vec<Complex64>, usize)
where
    A: FnMut(&[Complex64], &mut Vec<Complex64>),
    P: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let n = b.len();
    let mut x = vec![Complex64::default(); n];
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return (x, 0);
    }
    let target = rel_tol * b_norm;
    let mut total = 0;
    let mut r = b.to_vec();
    let mut av = Vec::with_capacity(n);
    loop {
        let beta = norm2(&r);
        if beta <= target || total >= max_iter {
            return (x, total);
        }
        let mut basis: Vec<Vec<Complex64>> = vec![r.iter().map(|c| c / beta).collect()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            let z = precond(&basis[k]);
            apply(&z, &mut av);
            let mut v = av.clone();
            for (i, q) in basis.iter().enumerate() {
                let hij = dot(&v, q);
                h[i][k] = hij;
                for (vv, qq) in v.iter_mut().zip(q) {
                    *vv -= qq * hij;
                }
            }
            let hn = norm2(&v);
            h[k + 1][k] = hn;
            for i in 0..k {
                let tmp = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = tmp;
            }
            let denom = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            cs[k] = if denom == 0.0 { 1.0 } else { h[k][k] / denom };
            sn[k] = if denom == 0.0 {
                0.0
            } else {
                h[k + 1][k] / denom
            };
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            if g[k + 1].abs() <= target || total >= max_iter || hn == 0.0 {
                break;
            }
            basis.push(v.iter().map(|c| c / hn).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        let mut u = vec![Complex64::default(); n];
        for (yi, q) in y.iter().zip(&basis) {
            for (uu, qq) in u.iter_mut().zip(q) {
                *uu += qq * *yi;
            }
        }
        let dx = precond(&u);
        for (xx, d) in x.iter_mut().zip(&dx) {
            *xx += d;
        }
        apply(&x, &mut av);
        for k in 0..n {
            r[k] = b[k] - av[k];
        }
    }
}

/// Inverse of the log-polar Laplacian (second order in `t`, the periodic
/// fourth-order symbol in `θ`) with homogeneous Dirichlet rows.
struct Poisson {
    nr: usize,
    nt: usize,
    ht: f64,
    lambda: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Poisson {
    fn new(grid: &AnnulusGrid) -> Self {
        let nt = grid.ntheta();
        let mut planner = FftPlanner::new();
        let lambda = (0..nt)
            .map(|k| periodic_d2_eigenvalue(k.min(nt - k), grid.htheta()))
            .collect();
        Self {
            nr: grid.nr(),
            nt,
            ht: grid.ht(),
            lambda,
            forward: planner.plan_fft_forward(nt),
            inverse: planner.plan_fft_inverse(nt),
        }
    }

    fn solve(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (nr, nt) = (self.nr, self.nt);
        let m = nr - 2;
        let mut spec = v[nt..(nr - 1) * nt].to_vec();
        for row in spec.chunks_mut(nt) {
            self.forward.process(row);
        }
        let a = 1.0 / (self.ht * self.ht);
        let mut c_prime = vec![0.0; m];
        let mut d_prime = vec![Complex64::default(); m];
        for k in 0..nt {
            let b = -2.0 * a + self.lambda[k];
            // Thomas sweep down column k
            for i in 0..m {
                let rhs = spec[i * nt + k];
                let (denom, prev_d) = if i == 0 {
                    (b, Complex64::default())
                } else {
                    (b - a * c_prime[i - 1], d_prime[i - 1])
                };
                c_prime[i] = a / denom;
                d_prime[i] = (rhs - prev_d * a) / denom;
            }
            spec[(m - 1) * nt + k] = d_prime[m - 1];
            for i in (0..m - 1).rev() {
                spec[i * nt + k] = d_prime[i] - spec[(i + 1) * nt + k] * c_prime[i];
            }
        }
        let norm = 1.0 / nt as f64;
        for row in spec.chunks_mut(nt) {
            self.inverse.process(row);
            row.iter_mut().for_each(|c| *c *= norm);
        }
        let mut out = vec![Complex64::default(); nr * nt];
        out[nt..(nr - 1) * nt].copy_from_slice(&spec);
        out
    }
}
