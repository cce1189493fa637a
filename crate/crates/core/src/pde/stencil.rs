//! Fourth-order finite-difference weights on uniform grids.

use std::ops::{Add, Mul};

/// Weights `w[k]` applied to samples `start + k`.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub start: usize,
    pub len: usize,
    pub w: [f64; 6],
}

impl Stencil {
    fn new(start: usize, coeffs: &[f64], scale: f64) -> Self {
        let mut w = [0.0; 6];
        for (dst, c) in w.iter_mut().zip(coeffs) {
            *dst = c * scale;
        }
        Self {
            start,
            len: coeffs.len(),
            w,
        }
    }

    #[inline]
    pub fn apply<T, F>(&self, get: F) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(usize) -> T,
    {
        let mut acc = T::default();
        for k in 0..self.len {
            acc = acc + get(self.start + k) * self.w[k];
        }
        acc
    }
}

const D1_CENTER: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D2_CENTER: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
const D1_EDGE: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const D2_EDGE: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
const D1_NEAR: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
const D2_NEAR: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];

fn mirrored<const N: usize>(c: &[f64; N], negate: bool) -> [f64; N] {
    let mut out = *c;
    out.reverse();
    if negate {
        out.iter_mut().for_each(|v| *v = -*v);
    }
    out
}

/// First derivative at node `i` of a non-periodic line of `n ≥ 6` nodes.
pub fn d1(i: usize, n: usize, h: f64) -> Stencil {
    let s = 1.0 / (12.0 * h);
    match i {
        0 => Stencil::new(0, &D1_EDGE, s),
        1 => Stencil::new(0, &D1_NEAR, s),
        _ if i + 1 == n => Stencil::new(n - 5, &mirrored(&D1_EDGE, true), s),
        _ if i + 2 == n => Stencil::new(n - 5, &mirrored(&D1_NEAR, true), s),
        _ => Stencil::new(i - 2, &D1_CENTER, s),
    }
}

/// Second derivative at node `i` of a non-periodic line of `n ≥ 6` nodes.
pub fn d2(i: usize, n: usize, h: f64) -> Stencil {
    let s = 1.0 / (12.0 * h * h);
    match i {
        0 => Stencil::new(0, &D2_EDGE, s),
        1 => Stencil::new(0, &D2_NEAR, s),
        _ if i + 1 == n => Stencil::new(n - 6, &mirrored(&D2_EDGE, false), s),
        _ if i + 2 == n => Stencil::new(n - 6, &mirrored(&D2_NEAR, false), s),
        _ => Stencil::new(i - 2, &D2_CENTER, s),
    }
}

/// Periodic first and second derivatives at `j` given a sample accessor
/// that wraps indices.
#[inline]
pub fn periodic<T, F>(j: usize, n: usize, h: f64, get: F) -> (T, T)
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(usize) -> T,
{
    let jm2 = (j + n - 2) % n;
    let jm1 = (j + n - 1) % n;
    let jp1 = (j + 1) % n;
    let jp2 = (j + 2) % n;
    let (fm2, fm1, f0, fp1, fp2) = (get(jm2), get(jm1), get(j), get(jp1), get(jp2));
    let s1 = 1.0 / (12.0 * h);
    let s2 = 1.0 / (12.0 * h * h);
    let d1 = fm2 * s1 + fm1 * (-8.0 * s1) + fp1 * (8.0 * s1) + fp2 * (-s1);
    let d2 = (fm2 + fp2) * (-s2) + (fm1 + fp1) * (16.0 * s2) + f0 * (-30.0 * s2);
    (d1, d2)
}

/// Symbol of the periodic second-derivative stencil on Fourier mode `k`.
pub fn periodic_d2_eigenvalue(k: usize, h: f64) -> f64 {
    let x = k as f64 * h;
    (-2.0 * (2.0 * x).cos() + 32.0 * x.cos() - 30.0) / (12.0 * h * h)
}
