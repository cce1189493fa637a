//! Conformal modulus of doubly connected domains.
//!
//! The capacity modulus is `2π / E(u)`, where `u` is the discrete harmonic
//! function equal to 0 on the inner and 1 on the outer boundary loop.
//! Masked domains are level sets `lo < λ(z) < hi` sampled on a Cartesian
//! or log-polar node grid. Links crossing the boundary are cut at the exact
//! level crossing and get conductance `w/α` for crossing fraction `α`,
//! which keeps the system symmetric.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::RotMetric;
use crate::pde::AnnulusMap;

pub type LevelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `log(r₂/r₁)`.
pub fn modulus_circular(r1: f64, r2: f64) -> Result<f64> {
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(invalid(format!("need 0 < r1 < r2, got {r1}, {r2}")));
    }
    Ok((r2 / r1).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MaskGrid {
    /// `n × n` nodes on the square of half-width `half` around `center`.
    Cartesian {
        center: [f64; 2],
        half: f64,
        n: usize,
    },
    /// Log-polar nodes `r_min ≤ |z| ≤ r_max`, periodic in angle.
    Polar {
        r_min: f64,
        r_max: f64,
        nr: usize,
        ntheta: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeClass {
    Inner,
    Inside,
    Outer,
}

/// A doubly connected region `lo < λ < hi` sampled on a node grid.
#[derive(Clone)]
pub struct MaskedDomain {
    grid: MaskGrid,
    level: LevelFn,
    lo: f64,
    hi: f64,
}

impl fmt::Debug for MaskedDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MaskedDomain")
            .field("grid", &self.grid)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum DoublyConnectedDomain {
    Circular { r1: f64, r2: f64 },
    Masked(MaskedDomain),
}

struct Link {
    a: usize,
    b: usize,
    weight: f64,
}

impl MaskedDomain {
    pub fn new(grid: MaskGrid, level: LevelFn, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(invalid(format!(
                "level thresholds must satisfy lo < hi, got {lo}, {hi}"
            )));
        }
        match grid {
            MaskGrid::Cartesian { half, n, .. } => {
                if !(half > 0.0) || n < 8 {
                    return Err(invalid("Cartesian mask needs half > 0 and n >= 8"));
                }
            }
            MaskGrid::Polar {
                r_min,
                r_max,
                nr,
                ntheta,
            } => {
                if !(r_min > 0.0 && r_max > r_min) || nr < 4 || ntheta < 8 {
                    return Err(invalid(
                        "polar mask needs 0 < r_min < r_max, nr >= 4, ntheta >= 8",
                    ));
                }
            }
        }
        Ok(Self {
            grid,
            level,
            lo,
            hi,
        })
    }

    pub fn cartesian<F>(
        level: F,
        lo: f64,
        hi: f64,
        center: [f64; 2],
        half: f64,
        n: usize,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(
            MaskGrid::Cartesian { center, half, n },
            Arc::new(level),
            lo,
            hi,
        )
    }

    pub fn polar<F>(
        level: F,
        lo: f64,
        hi: f64,
        r_min: f64,
        r_max: f64,
        nr: usize,
        ntheta: usize,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(
            MaskGrid::Polar {
                r_min,
                r_max,
                nr,
                ntheta,
            },
            Arc::new(level),
            lo,
            hi,
        )
    }

    /// The circular annulus `r₁ < |z| < r₂` on a Cartesian grid with a
    /// 10% margin around the outer circle.
    pub fn circular_cartesian(r1: f64, r2: f64, n: usize) -> Result<Self> {
        modulus_circular(r1, r2)?;
        Self::cartesian(|x, y| x.hypot(y), r1, r2, [0.0, 0.0], 1.1 * r2, n)
    }

    /// The circular annulus on a log-polar grid whose first and last rows
    /// sit half a step outside the two circles.
    pub fn circular_polar(r1: f64, r2: f64, nr: usize, ntheta: usize) -> Result<Self> {
        let t = modulus_circular(r1, r2)?;
        if nr < 4 {
            return Err(invalid(format!("need at least 4 radial nodes, got {nr}")));
        }
        let pad = (0.5 * t / (nr - 2) as f64).exp();
        Self::polar(|x, y| x.hypot(y), r1, r2, r1 / pad, r2 * pad, nr, ntheta)
    }

    /// The geodesic annulus `ρ₁ < d(|z|) < ρ₂` of a rotationally symmetric
    /// metric on an `n × n` Cartesian grid reaching 5% past the outer
    /// circle.
    pub fn geodesic(metric: &RotMetric, rho1: f64, rho2: f64, n: usize) -> Result<Self> {
        if !(rho1 > 0.0 && rho2 > rho1) {
            return Err(invalid(format!("need 0 < rho1 < rho2, got {rho1}, {rho2}")));
        }
        let s2 = metric.inverse_distance(rho2)?;
        metric.inverse_distance(rho1)?;
        let m = metric.clone();
        let s_max = m.s_max();
        Self::cartesian(
            move |x, y| m.distance(x.hypot(y).min(s_max)).unwrap_or(f64::INFINITY),
            rho1,
            rho2,
            [0.0, 0.0],
            1.05 * s2,
            n,
        )
    }

    /// Image of the domain under `z ↦ c/z`, on the same grid. Inversion
    /// swaps the two boundary components, so the level is negated.
    pub fn inverted(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(invalid("inversion constant must be positive"));
        }
        let level = self.level.clone();
        let inv: LevelFn = Arc::new(move |x, y| {
            if x == 0.0 && y == 0.0 {
                return f64::NEG_INFINITY;
            }
            let w = Complex64::new(c, 0.0) / Complex64::new(x, y);
            -level(w.re, w.im)
        });
        Self::new(self.grid, inv, -self.hi, -self.lo)
    }

    pub fn grid(&self) -> MaskGrid {
        self.grid
    }

    fn node_count(&self) -> usize {
        match self.grid {
            MaskGrid::Cartesian { n, .. } => n * n,
            MaskGrid::Polar { nr, ntheta, .. } => nr * ntheta,
        }
    }

    /// Grid parameters `(u, v)` of node `k`.
    fn param(&self, k: usize) -> (f64, f64) {
        match self.grid {
            MaskGrid::Cartesian { center, half, n } => {
                let h = 2.0 * half / (n - 1) as f64;
                let (i, j) = (k / n, k % n);
                (
                    center[0] - half + j as f64 * h,
                    center[1] - half + i as f64 * h,
                )
            }
            MaskGrid::Polar {
                r_min,
                r_max,
                nr,
                ntheta,
            } => {
                let ht = (r_max / r_min).ln() / (nr - 1) as f64;
                let (i, j) = (k / ntheta, k % ntheta);
                (
                    r_min.ln() + i as f64 * ht,
                    2.0 * PI * j as f64 / ntheta as f64,
                )
            }
        }
    }

    fn to_xy(&self, u: f64, v: f64) -> (f64, f64) {
        match self.grid {
            MaskGrid::Cartesian { .. } => (u, v),
            MaskGrid::Polar { .. } => {
                let r = u.exp();
                (r * v.cos(), r * v.sin())
            }
        }
    }

    fn level_at(&self, u: f64, v: f64) -> f64 {
        let (x, y) = self.to_xy(u, v);
        (self.level)(x, y)
    }

    fn links(&self) -> Vec<Link> {
        let mut out = Vec::new();
        match self.grid {
            MaskGrid::Cartesian { n, .. } => {
                for i in 0..n {
                    for j in 0..n {
                        let k = i * n + j;
                        if j + 1 < n {
                            out.push(Link {
                                a: k,
                                b: k + 1,
                                weight: 1.0,
                            });
                        }
                        if i + 1 < n {
                            out.push(Link {
                                a: k,
                                b: k + n,
                                weight: 1.0,
                            });
                        }
                    }
                }
            }
            MaskGrid::Polar {
                r_min,
                r_max,
                nr,
                ntheta,
            } => {
                let ht = (r_max / r_min).ln() / (nr - 1) as f64;
                let hp = 2.0 * PI / ntheta as f64;
                for i in 0..nr {
                    for j in 0..ntheta {
                        let k = i * ntheta + j;
                        out.push(Link {
                            a: k,
                            b: i * ntheta + (j + 1) % ntheta,
                            weight: ht / hp,
                        });
                        if i + 1 < nr {
                            out.push(Link {
                                a: k,
                                b: k + ntheta,
                                weight: hp / ht,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn boundary_nodes(&self) -> Vec<usize> {
        match self.grid {
            MaskGrid::Cartesian { n, .. } => (0..n * n)
                .filter(|k| {
                    let (i, j) = (k / n, k % n);
                    i == 0 || j == 0 || i == n - 1 || j == n - 1
                })
                .collect(),
            MaskGrid::Polar { nr, ntheta, .. } => ((nr - 1) * ntheta..nr * ntheta).collect(),
        }
    }

    fn inner_rim(&self) -> Vec<usize> {
        match self.grid {
            MaskGrid::Cartesian { .. } => Vec::new(),
            MaskGrid::Polar { ntheta, .. } => (0..ntheta).collect(),
        }
    }

    /// Fraction `α ∈ (0, 1]` along the link from `a` to `b` where the level
    /// crosses `target`.
    fn crossing(&self, target: f64, link_param: (f64, f64, f64, f64)) -> f64 {
        let (ua, va, du, dv) = link_param;
        let f = |s: f64| self.level_at(ua + s * du, va + s * dv) - target;
        let fa = f(0.0);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (fa > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).max(1e-6)
    }

    fn link_param(&self, a: usize, b: usize) -> (f64, f64, f64, f64) {
        let (ua, va) = self.param(a);
        let (ub, mut vb) = self.param(b);
        if let MaskGrid::Polar { .. } = self.grid {
            let d = vb - va;
            if d > PI {
                vb -= 2.0 * PI;
            } else if d < -PI {
                vb += 2.0 * PI;
            }
        }
        (ua, va, ub - ua, vb - va)
    }
}

fn components(n: usize, links: &[Link], class: &[NodeClass], which: NodeClass) -> usize {
    let mut adj = vec![Vec::new(); n];
    for l in links {
        if class[l.a] == which && class[l.b] == which {
            adj[l.a].push(l.b);
            adj[l.b].push(l.a);
        }
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if class[start] != which || seen[start] {
            continue;
        }
        count += 1;
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(k) = queue.pop_front() {
            for &q in &adj[k] {
                if !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    count
}

/// Result of a capacity computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub modulus: f64,
    pub energy: f64,
    pub unknowns: usize,
    pub cg_iterations: usize,
    pub relative_residual: f64,
}

pub const CG_TOL: f64 = 1e-10;

pub fn modulus_capacity(d: &DoublyConnectedDomain) -> Result<f64> {
    Ok(capacity(d)?.modulus)
}

pub fn capacity(d: &DoublyConnectedDomain) -> Result<CapacityResult> {
    match d {
        DoublyConnectedDomain::Circular { r1, r2 } => {
            capacity_masked(&MaskedDomain::circular_polar(*r1, *r2, 256, 256)?)
        }
        DoublyConnectedDomain::Masked(m) => capacity_masked(m),
    }
}

pub fn capacity_masked(m: &MaskedDomain) -> Result<CapacityResult> {
    let n = m.node_count();
    let class: Vec<NodeClass> = (0..n)
        .map(|k| {
            let (u, v) = m.param(k);
            let l = m.level_at(u, v);
            if l <= m.lo {
                NodeClass::Inner
            } else if l >= m.hi {
                NodeClass::Outer
            } else {
                NodeClass::Inside
            }
        })
        .collect();
    let links = m.links();

    if m.boundary_nodes()
        .iter()
        .any(|&k| class[k] != NodeClass::Outer)
    {
        return Err(Error::DegenerateMask(
            "the domain reaches the outer edge of the grid".into(),
        ));
    }
    if m.inner_rim().iter().any(|&k| class[k] != NodeClass::Inner) {
        return Err(Error::DegenerateMask(
            "the domain reaches the inner edge of the polar grid".into(),
        ));
    }
    for (which, name) in [
        (NodeClass::Inner, "inner complement"),
        (NodeClass::Inside, "domain"),
        (NodeClass::Outer, "outer complement"),
    ] {
        let c = components(n, &links, &class, which);
        if c != 1 {
            return Err(Error::DegenerateMask(format!(
                "{name} has {c} connected components, expected 1"
            )));
        }
    }

    let mut index = vec![usize::MAX; n];
    let mut unknowns = 0;
    for k in 0..n {
        if class[k] == NodeClass::Inside {
            index[k] = unknowns;
            unknowns += 1;
        }
    }

    let mut diag = vec![0.0; unknowns];
    let mut rhs = vec![0.0; unknowns];
    let mut interior: Vec<(usize, usize, f64)> = Vec::new();
    // (unknown, conductance, boundary value)
    let mut cut: Vec<(usize, f64, f64)> = Vec::new();
    for l in &links {
        let (ca, cb) = (class[l.a], class[l.b]);
        match (ca, cb) {
            (NodeClass::Inside, NodeClass::Inside) => {
                let (ia, ib) = (index[l.a], index[l.b]);
                diag[ia] += l.weight;
                diag[ib] += l.weight;
                interior.push((ia, ib, l.weight));
            }
            (NodeClass::Inside, other) | (other, NodeClass::Inside) => {
                let (p, q) = if ca == NodeClass::Inside {
                    (l.a, l.b)
                } else {
                    (l.b, l.a)
                };
                let (target, value) = if other == NodeClass::Inner {
                    (m.lo, 0.0)
                } else {
                    (m.hi, 1.0)
                };
                let alpha = m.crossing(target, m.link_param(p, q));
                let c = l.weight / alpha;
                diag[index[p]] += c;
                rhs[index[p]] += c * value;
                cut.push((index[p], c, value));
            }
            (NodeClass::Inner, NodeClass::Outer) | (NodeClass::Outer, NodeClass::Inner) => {
                return Err(Error::DegenerateMask(
                    "inner and outer boundary loops touch".into(),
                ));
            }
            _ => {}
        }
    }

    let apply = |x: &[f64], y: &mut [f64]| {
        for (yi, (xi, di)) in y.iter_mut().zip(x.iter().zip(&diag)) {
            *yi = di * xi;
        }
        for &(a, b, w) in &interior {
            y[a] -= w * x[b];
            y[b] -= w * x[a];
        }
    };

    let (u, iters, rel) = conjugate_gradient(apply, &diag, &rhs, CG_TOL, 20 * unknowns + 1000)?;

    let mut energy = 0.0;
    for &(a, b, w) in &interior {
        energy += w * (u[a] - u[b]).powi(2);
    }
    for &(p, c, v) in &cut {
        energy += c * (u[p] - v).powi(2);
    }
    Ok(CapacityResult {
        modulus: 2.0 * PI / energy,
        energy,
        unknowns,
        cg_iterations: iters,
        relative_residual: rel,
    })
}

fn conjugate_gradient<A>(
    apply: A,
    diag: &[f64],
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize, f64)>
where
    A: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(a, d)| a / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rel = r.iter().map(|v| v * v).sum::<f64>().sqrt() / b_norm;
        if rel <= tol {
            return Ok((x, it, rel));
        }
        for k in 0..n {
            z[k] = r[k] / diag[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    let rel = r.iter().map(|v| v * v).sum::<f64>().sqrt() / b_norm;
    Err(Error::LinearSolve {
        iterations: max_iter,
        residual: rel,
    })
}

/// Discrete `∫∫|∇θ|² dx dy` by cell-midpoint quadrature in `(log r, θ)`.
/// For winding-one angle fields this is never below `2π log(r₂/r₁)`.
pub fn angular_energy(f: &AnnulusMap) -> f64 {
    let g = f.grid();
    let (nr, nt) = (g.nr(), g.ntheta());
    let (ht, hp) = (g.ht(), g.htheta());
    let th = f.theta();
    let dphi = |i: usize, j: usize| -> f64 {
        let a = th[g.idx(i, j)];
        let b = th[g.idx(i, (j + 1) % nt)];
        if j + 1 == nt {
            b + 2.0 * PI - a
        } else {
            b - a
        }
    };
    let dt = |i: usize, j: usize| th[g.idx(i + 1, j)] - th[g.idx(i, j)];
    let mut e = 0.0;
    for i in 0..nr - 1 {
        for j in 0..nt {
            let jp = (j + 1) % nt;
            let tp = 0.5 * (dphi(i, j) + dphi(i + 1, j)) / hp;
            let tt = 0.5 * (dt(i, j) + dt(i, jp)) / ht;
            e += (tp * tp + tt * tt) * ht * hp;
        }
    }
    e
}
