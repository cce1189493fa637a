//! Discrete harmonic-map operator and Hopf differential.

use num_complex::Complex64;

use super::grid::AnnulusGrid;
use super::map::{partials, AnnulusMap, Partials};
use super::stencil::{d1, periodic};
use crate::error::Result;
use crate::metric::RotMetric;

/// `(log h²)_w = (h′/h)(w̄/|w|)` for the density `h(|w|)`.
#[inline]
fn log_density_w(m: &RotMetric, w: Complex64) -> Complex64 {
    let s = w.norm();
    if s < 1e-300 {
        return Complex64::new(0.0, 0.0);
    }
    let ratio = m.density_derivative(s) / m.density(s);
    w.conj() * (ratio / s)
}

/// The tension in log-polar variables, `Δ_ζ w + (log h²)_w (w_t² + w_φ²)`,
/// on interior rows; boundary rows are zero.
pub(crate) fn zeta_residual(
    grid: &AnnulusGrid,
    m: &RotMetric,
    w: &[Complex64],
    out: &mut [Complex64],
) {
    let (nr, nt) = (grid.nr(), grid.ntheta());
    let (ht, hp) = (grid.ht(), grid.htheta());
    out[..nt].fill(Complex64::default());
    out[(nr - 1) * nt..].fill(Complex64::default());
    for i in 1..nr - 1 {
        let s1 = d1(i, nr, ht);
        let s2 = super::stencil::d2(i, nr, ht);
        let row = &w[i * nt..(i + 1) * nt];
        for j in 0..nt {
            let wt = s1.apply(|k| w[k * nt + j]);
            let wtt = s2.apply(|k| w[k * nt + j]);
            let (wp, wpp) = periodic(j, nt, hp, |q| row[q]);
            let v = row[j];
            out[i * nt + j] = wtt + wpp + log_density_w(m, v) * (wt * wt + wp * wp);
        }
    }
}

/// Discrete left side of `f_{zz̄} + (log h²)_w∘f · f_z f_{z̄} = 0` in the
/// chart `w = g(ρ)e^{iθ}`, per node. Boundary rows are zero.
pub fn harmonicity_residual(f: &AnnulusMap) -> Result<Vec<Complex64>> {
    let g = f.grid();
    let w = f.chart_values()?;
    let mut out = vec![Complex64::default(); g.len()];
    zeta_residual(g, f.metric(), &w, &mut out);
    scale_to_z(g, &mut out);
    Ok(out)
}

pub(crate) fn scale_to_z(g: &AnnulusGrid, v: &mut [Complex64]) {
    let nt = g.ntheta();
    for i in 0..g.nr() {
        let r = g.r(i);
        let s = 0.25 / (r * r);
        for x in &mut v[i * nt..(i + 1) * nt] {
            *x *= s;
        }
    }
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Largest interior harmonicity defect.
pub fn max_harmonicity_residual(f: &AnnulusMap) -> Result<f64> {
    Ok(max_abs(&harmonicity_residual(f)?))
}

/// `Ψ_ζ = h²(|w|)·f_ζ·conj(f_ζ̄)` in log-polar variables.
fn hopf_zeta(f: &AnnulusMap) -> Result<Vec<Complex64>> {
    let m = f.metric();
    let w = f.chart_values()?;
    let d: Vec<Partials<Complex64>> = partials(f.grid(), &w);
    let i_unit = Complex64::i();
    Ok(w.iter()
        .zip(&d)
        .map(|(v, p)| {
            let fz = (p.t - i_unit * p.p) * 0.5;
            let fzb = (p.t + i_unit * p.p) * 0.5;
            let h = m.density(v.norm());
            fz * fzb.conj() * (h * h)
        })
        .collect())
}

/// Hopf differential `Ψ[f] = h²∘f · f_z · conj(f_{z̄})` at every node.
pub fn hopf_differential(f: &AnnulusMap) -> Result<Vec<Complex64>> {
    let g = f.grid();
    let mut psi = hopf_zeta(f)?;
    for i in 0..g.nr() {
        for j in 0..g.ntheta() {
            let z = g.z(i, j);
            psi[g.idx(i, j)] /= z * z;
        }
    }
    Ok(psi)
}

/// First row of the deep interior used for `∂̄Ψ`.
pub const HOPF_MARGIN_ROWS: usize = 4;

/// `∂_{z̄}Ψ[f]` on rows `4..nR−4` (zero elsewhere).
pub fn hopf_dbar(f: &AnnulusMap) -> Result<Vec<Complex64>> {
    let g = f.grid();
    let (nr, nt) = (g.nr(), g.ntheta());
    let psi = hopf_zeta(f)?;
    let mut out = vec![Complex64::default(); g.len()];
    for i in HOPF_MARGIN_ROWS..nr - HOPF_MARGIN_ROWS {
        let s1 = d1(i, nr, g.ht());
        let row = &psi[i * nt..(i + 1) * nt];
        for j in 0..nt {
            let dt = s1.apply(|k| psi[k * nt + j]);
            let (dp, _) = periodic(j, nt, g.htheta(), |q| row[q]);
            let z = g.z(i, j);
            out[i * nt + j] = (dt + Complex64::i() * dp) * 0.5 / (z * z * z.conj());
        }
    }
    Ok(out)
}

/// Largest `|∂_{z̄}Ψ[f]|` over the deep interior.
pub fn hopf_dbar_norm(f: &AnnulusMap) -> Result<f64> {
    Ok(max_abs(&hopf_dbar(f)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::CurvatureBound;
    use crate::radial::shoot;

    #[test]
    fn conformal_map_has_small_residual_and_zero_hopf() {
        let grid = AnnulusGrid::new(0.5, 1.0, 64, 256).unwrap();
        let m = RotMetric::flat();
        let p = shoot(&m, 0.4, 0.4, grid.modulus()).unwrap();
        let f = AnnulusMap::from_radial(grid, m, &p).unwrap();
        let res = max_harmonicity_residual(&f).unwrap();
        assert!(res < 1e-8, "{res}");
        let hopf = max_abs(&hopf_differential(&f).unwrap());
        assert!(hopf < 1e-8, "{hopf}");
    }

    #[test]
    fn radial_hyperbolic_map_is_harmonic_and_perturbation_is_not() {
        let m = RotMetric::constant(CurvatureBound::negative(1.0).unwrap());
        let grid = AnnulusGrid::new(1.0, 0.6f64.exp(), 128, 128).unwrap();
        let p = shoot(&m, 0.5, 0.3, grid.modulus()).unwrap();
        let f = AnnulusMap::from_radial(grid, m.clone(), &p).unwrap();
        assert!(max_harmonicity_residual(&f).unwrap() < 1e-6);
        assert!(hopf_dbar_norm(&f).unwrap() < 1e-6);
        let mut rho = f.rho().to_vec();
        for (k, r) in rho.iter_mut().enumerate() {
            *r += 0.01 * (grid.theta(k % grid.ntheta())).sin();
        }
        let bad = AnnulusMap::from_fields(grid, m, rho, f.theta().to_vec()).unwrap();
        assert!(max_harmonicity_residual(&bad).unwrap() > 1e-3);
        assert!(hopf_dbar_norm(&bad).unwrap() > 1e-3);
    }
}
