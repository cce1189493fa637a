//! Radial harmonic maps between annuli.
//!
//! With `t = log(|z|/r₁)` a radial map `ρ(t)e^{iφ}` is harmonic exactly when
//! `ρ_tt = ½ d(G²)/dρ`, so the two-point problem is a scalar shooting problem.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::RotMetric;
use crate::numeric::hermite;

/// Fixed RK4 step count over `[0, T]`.
pub const DEFAULT_STEPS: usize = 4096;
/// Target accuracy of `ρ(T) = ρ₂` in the boundary-value solver.
pub const BVP_TOL: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

/// A sampled radial solution `ρ(t)`, `t ∈ [0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub t: Vec<f64>,
    pub rho: Vec<f64>,
    pub slope: Vec<f64>,
    pub slope0: f64,
    /// Largest difference against a run with half the step size.
    pub residual: f64,
}

impl RadialProfile {
    pub fn modulus(&self) -> f64 {
        *self.t.last().unwrap()
    }

    pub fn rho1(&self) -> f64 {
        self.rho[0]
    }

    pub fn rho2(&self) -> f64 {
        *self.rho.last().unwrap()
    }

    /// Value and slope at `t`, by cubic Hermite interpolation.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.t.len();
        let i = self
            .t
            .partition_point(|&v| v <= t)
            .saturating_sub(1)
            .min(n - 2);
        hermite(
            self.t[i],
            self.t[i + 1],
            self.rho[i],
            self.rho[i + 1],
            self.slope[i],
            self.slope[i + 1],
            t,
        )
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.rho.windows(2).all(|w| w[1] > w[0])
    }

    /// CSV with columns `t,rho,slope`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,rho,slope")?;
        for ((t, r), s) in self.t.iter().zip(&self.rho).zip(&self.slope) {
            writeln!(out, "{t:.17e},{r:.17e},{s:.17e}")?;
        }
        Ok(())
    }
}

/// Result of the two-point problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BvpOutcome {
    Solved(RadialProfile),
    /// Even the zero-slope trajectory overshoots `ρ₂`: no monotone radial
    /// harmonic map exists for this modulus.
    NoSolution {
        critical_outer: f64,
    },
}

impl BvpOutcome {
    pub fn profile(&self) -> Option<&RadialProfile> {
        match self {
            BvpOutcome::Solved(p) => Some(p),
            BvpOutcome::NoSolution { .. } => None,
        }
    }
}

/// `½ d(G²)/dρ`.
pub fn ode_rhs(m: &RotMetric, rho: f64) -> Result<f64> {
    m.half_dg2(rho)
}

fn check_state(m: &RotMetric, t: f64, rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho >= 0.0 && rho < m.distance_range()) {
        return Err(Error::RangeExit { t, rho });
    }
    Ok(())
}

fn rhs(m: &RotMetric, t: f64, rho: f64) -> Result<f64> {
    check_state(m, t, rho)?;
    m.half_dg2(rho).map_err(|_| Error::RangeExit { t, rho })
}

fn rk4_step(m: &RotMetric, t: f64, y: f64, v: f64, h: f64) -> Result<(f64, f64)> {
    let a1 = rhs(m, t, y)?;
    let a2 = rhs(m, t, y + 0.5 * h * v)?;
    let a3 = rhs(m, t, y + 0.5 * h * v + 0.25 * h * h * a1)?;
    let a4 = rhs(m, t, y + h * v + 0.5 * h * h * a2)?;
    let y_new = y + h * v + h * h / 6.0 * (a1 + a2 + a3);
    let v_new = v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    let t_new = t + h;
    check_state(m, t_new, y_new)?;
    Ok((y_new, v_new))
}

fn check_steps(modulus: f64, steps: usize) -> Result<f64> {
    let h = modulus / steps as f64;
    if !(h > 0.0) || modulus + h == modulus {
        return Err(Error::StepUnderflow { modulus });
    }
    Ok(h)
}

/// `(ρ(T), ρ_t(T))` without storing the path.
fn endpoint(
    m: &RotMetric,
    rho1: f64,
    slope0: f64,
    modulus: f64,
    steps: usize,
) -> Result<(f64, f64)> {
    let h = check_steps(modulus, steps)?;
    check_state(m, 0.0, rho1)?;
    let (mut y, mut v) = (rho1, slope0);
    for k in 0..steps {
        (y, v) = rk4_step(m, k as f64 * h, y, v, h)?;
    }
    Ok((y, v))
}

fn path(
    m: &RotMetric,
    rho1: f64,
    slope0: f64,
    modulus: f64,
    steps: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = check_steps(modulus, steps)?;
    check_state(m, 0.0, rho1)?;
    let mut ys = Vec::with_capacity(steps + 1);
    let mut vs = Vec::with_capacity(steps + 1);
    let (mut y, mut v) = (rho1, slope0);
    ys.push(y);
    vs.push(v);
    for k in 0..steps {
        (y, v) = rk4_step(m, k as f64 * h, y, v, h)?;
        ys.push(y);
        vs.push(v);
    }
    Ok((ys, vs))
}

fn validate(rho1: f64, modulus: f64) -> Result<()> {
    if !(modulus > 0.0 && modulus.is_finite()) {
        return Err(invalid(format!(
            "modulus must be positive and finite, got {modulus}"
        )));
    }
    if !(rho1 >= 0.0 && rho1.is_finite()) {
        return Err(invalid(format!(
            "rho1 must be nonnegative and finite, got {rho1}"
        )));
    }
    Ok(())
}

/// Integrate `ρ_tt = ½(G²)′(ρ)` from `(ρ₁, slope0)` over `[0, T]` with RK4.
pub fn shoot(m: &RotMetric, rho1: f64, slope0: f64, modulus: f64) -> Result<RadialProfile> {
    shoot_with_steps(m, rho1, slope0, modulus, DEFAULT_STEPS)
}

pub fn shoot_with_steps(
    m: &RotMetric,
    rho1: f64,
    slope0: f64,
    modulus: f64,
    steps: usize,
) -> Result<RadialProfile> {
    validate(rho1, modulus)?;
    if !slope0.is_finite() || steps == 0 {
        return Err(invalid("slope0 must be finite and steps positive"));
    }
    let (coarse, _) = path(m, rho1, slope0, modulus, steps)?;
    let (fine_y, fine_v) = path(m, rho1, slope0, modulus, 2 * steps)?;
    let rho: Vec<f64> = fine_y.iter().step_by(2).copied().collect();
    let slope: Vec<f64> = fine_v.iter().step_by(2).copied().collect();
    let residual = coarse
        .iter()
        .zip(&rho)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let h = modulus / steps as f64;
    let t = (0..=steps).map(|k| k as f64 * h).collect();
    Ok(RadialProfile {
        t,
        rho,
        slope,
        slope0,
        residual,
    })
}

/// `ρ(T)` of the zero-initial-slope trajectory.
pub fn critical_outer(m: &RotMetric, rho1: f64, modulus: f64) -> Result<f64> {
    validate(rho1, modulus)?;
    Ok(endpoint(m, rho1, 0.0, modulus, 2 * DEFAULT_STEPS)?.0)
}

/// Find the monotone radial harmonic map with `ρ(0) = ρ₁`, `ρ(T) = ρ₂` by
/// bisection on the initial slope.
pub fn solve_bvp(m: &RotMetric, rho1: f64, rho2: f64, modulus: f64) -> Result<BvpOutcome> {
    validate(rho1, modulus)?;
    if !(rho1 > 0.0 && rho2 > rho1 && rho2.is_finite()) {
        return Err(invalid(format!("need 0 < rho1 < rho2, got {rho1}, {rho2}")));
    }
    let steps = 2 * DEFAULT_STEPS;
    let reach = |s: f64| -> Result<Option<f64>> {
        match endpoint(m, rho1, s, modulus, steps) {
            Ok((y, _)) => Ok(Some(y)),
            Err(Error::RangeExit { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let base = endpoint(m, rho1, 0.0, modulus, steps)?.0;
    if base > rho2 + BVP_TOL {
        return Ok(BvpOutcome::NoSolution {
            critical_outer: base,
        });
    }
    let mut lo = 0.0;
    let mut hi = 10.0 * (rho2 - rho1) / modulus;
    let mut best = (0.0, base);
    match reach(hi)? {
        Some(y) if y < rho2 - BVP_TOL => {
            return Err(Error::NonBracketing {
                target: rho2,
                reached: y,
            })
        }
        Some(y) if (y - rho2).abs() < (best.1 - rho2).abs() => best = (hi, y),
        _ => {}
    }
    for _ in 0..MAX_BISECTIONS {
        if (best.1 - rho2).abs() <= BVP_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match reach(mid)? {
            Some(y) => {
                if (y - rho2).abs() < (best.1 - rho2).abs() {
                    best = (mid, y);
                }
                if y < rho2 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            None => hi = mid,
        }
    }
    if (best.1 - rho2).abs() > BVP_TOL {
        return Err(Error::NonBracketing {
            target: rho2,
            reached: best.1,
        });
    }
    Ok(BvpOutcome::Solved(shoot(m, rho1, best.0, modulus)?))
}

/// Critical Nitsche radius `2r/(1+r²)` of the planar annulus `r < |z| < 1`.
pub fn nitsche_euclidean(r: f64) -> Result<f64> {
    nitsche_ndim(r, 2)
}

/// `n r/(n − 1 + rⁿ)`.
pub fn nitsche_ndim(r: f64, n: u32) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("need 0 < r < 1, got {r}")));
    }
    if n < 2 {
        return Err(invalid(format!("dimension must be >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(nf * r / (nf - 1.0 + r.powi(n as i32)))
}

/// The radial harmonic map of `r ≤ |x| ≤ 1` onto `ρ ≤ |y| ≤ 1` in `ℝⁿ`,
/// `n = x.len()`.
pub fn radial_map_ndim(x: &[f64], r: f64, rho: f64) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 2 {
        return Err(invalid("points need at least two coordinates"));
    }
    if !(r > 0.0 && r < 1.0 && rho > 0.0 && rho <= 1.0) {
        return Err(invalid(format!(
            "need 0 < r < 1 and 0 < rho <= 1, got {r}, {rho}"
        )));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let slack = 1e-12;
    if norm < r * (1.0 - slack) || norm > 1.0 + slack {
        return Err(invalid(format!("|x| = {norm} outside [{r}, 1]")));
    }
    let ni = n as i32;
    let rn = r.powi(ni);
    let rn1 = r.powi(ni - 1);
    let a = (1.0 - rn1 * rho) / (1.0 - rn);
    let b = (rn1 * rho - rn) / (1.0 - rn);
    let c = a + b / norm.powi(ni);
    Ok(x.iter().map(|v| c * v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::CurvatureBound;
    use approx::assert_relative_eq;

    fn hyperbolic() -> RotMetric {
        RotMetric::constant(CurvatureBound::negative(1.0).unwrap())
    }

    #[test]
    fn rhs_examples() {
        assert_relative_eq!(ode_rhs(&RotMetric::flat(), 0.4).unwrap(), 0.4);
        assert_relative_eq!(
            ode_rhs(&hyperbolic(), 0.5).unwrap(),
            0.5876005968219007,
            epsilon = 1e-14
        );
        let sph = RotMetric::constant(CurvatureBound::positive(1.0).unwrap());
        assert_relative_eq!(
            ode_rhs(&sph, std::f64::consts::FRAC_PI_4).unwrap(),
            0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn flat_conformal_shot_is_exponential() {
        let p = shoot(&RotMetric::flat(), 0.3, 0.3, 0.9).unwrap();
        for (t, r) in p.t.iter().zip(&p.rho) {
            assert!((r - 0.3 * t.exp()).abs() <= 1e-10);
        }
        assert!(p.residual <= 1e-10);
    }

    #[test]
    fn flat_critical_shot() {
        let p = shoot(&RotMetric::flat(), 0.8, 0.0, 2f64.ln()).unwrap();
        assert_relative_eq!(p.rho2(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hyperbolic_shot_matches_reference() {
        let p = shoot(&hyperbolic(), 1.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(p.rho2(), 2.527178458560027, epsilon = 1e-9);
        assert!(p.residual < 1e-8);
    }

    #[test]
    fn range_exit_is_reported() {
        let sph = RotMetric::constant(CurvatureBound::positive(1.0).unwrap());
        match shoot(&sph, 1.0, 20.0, 1.0) {
            Err(Error::RangeExit { t, .. }) => assert!(t > 0.0 && t < 1.0),
            other => panic!("expected range exit, got {other:?}"),
        }
    }

    #[test]
    fn bvp_examples() {
        let flat = RotMetric::flat();
        match solve_bvp(&flat, 0.8, 1.0, 2f64.ln()).unwrap() {
            BvpOutcome::Solved(p) => assert!(p.slope0.abs() < 1e-8),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            solve_bvp(&flat, 0.9, 1.0, 2f64.ln()).unwrap(),
            BvpOutcome::NoSolution { .. }
        ));
        let a = solve_bvp(&flat, 0.3, 0.9, 0.7).unwrap();
        let b = solve_bvp(&flat, 0.6, 1.8, 0.7).unwrap();
        assert_relative_eq!(
            2.0 * a.profile().unwrap().slope0,
            b.profile().unwrap().slope0,
            max_relative = 1e-8
        );
    }

    #[test]
    fn critical_outer_examples() {
        let flat = RotMetric::flat();
        let r: f64 = 0.5;
        assert_relative_eq!(
            critical_outer(&flat, nitsche_euclidean(r).unwrap(), -r.ln()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let t: f64 = 0.05;
        let v = critical_outer(&flat, 1.0, t).unwrap();
        assert_relative_eq!(v, t.cosh(), epsilon = 1e-12);
        let sph = RotMetric::constant(CurvatureBound::positive(1.0).unwrap());
        assert_relative_eq!(
            critical_outer(&sph, 0.2, 0.5).unwrap(),
            0.22480726343116267,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            critical_outer(&flat, 0.2, 0.5).unwrap(),
            0.22552519304127616,
            epsilon = 1e-10
        );
    }

    #[test]
    fn closed_form_maps() {
        assert_relative_eq!(nitsche_euclidean(0.5).unwrap(), 0.8);
        assert_relative_eq!(nitsche_euclidean(0.1).unwrap(), 0.19801980198019803);
        assert_relative_eq!(nitsche_ndim(0.5, 3).unwrap(), 1.5 / 2.125);
        assert_relative_eq!(nitsche_ndim(0.5, 2).unwrap(), 0.8);
        assert!(nitsche_ndim(1.0, 2).is_err());
        let y = radial_map_ndim(&[0.6, 0.8, 0.0], 0.5, 0.8).unwrap();
        assert_relative_eq!(y[0], 0.6, epsilon = 1e-15);
        let y = radial_map_ndim(&[0.3, 0.0, 0.4], 0.5, 0.8).unwrap();
        let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_relative_eq!(n, 0.8, epsilon = 1e-14);
        assert!(radial_map_ndim(&[0.1, 0.1], 0.5, 0.8).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = shoot_with_steps(&RotMetric::flat(), 0.5, 0.1, 0.2, 8).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,rho,slope\n"));
        assert_eq!(text.lines().count(), 10);
    }
}
