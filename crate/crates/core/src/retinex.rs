//! Illumination / reflectance decomposition of the brightness plane.
//!
//! The illumination `I` minimizes
//!
//! ```text
//! E(I) = sum (I - V)^2 + lambda * sum_d w_d (grad_d I)^2,   w_d = 1 / (|grad_d V| + eps_grad)
//! ```
//!
//! over forward differences in x and y (replicate boundary, so the last
//! column/row contributes no difference). The normal equations
//! `(Id + lambda * D^T W D) I = V` are symmetric positive definite and are
//! solved matrix-free with Jacobi-preconditioned conjugate gradients. The
//! result is clamped to `I >= max(V, eps_div)` and reflectance is `V / I`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::Plane;
use crate::math::sqrt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompParams {
    /// Smoothness weight.
    pub lambda: f64,
    /// Floor added to gradient magnitudes before inverting them.
    pub eps_grad: f64,
    pub max_iters: usize,
    /// Relative residual `||b - A x|| / ||b||` at which the solver stops.
    pub tol: f64,
    /// Lower bound on illumination; also the division floor for reflectance.
    pub eps_div: f64,
}

impl Default for DecompParams {
    fn default() -> Self {
        Self {
            lambda: 0.15,
            eps_grad: 0.01,
            max_iters: 500,
            tol: 1e-5,
            eps_div: 1.0 / 255.0,
        }
    }
}

impl DecompParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter("lambda must be > 0"));
        }
        if !(self.eps_grad > 0.0) {
            return Err(Error::InvalidParameter("eps_grad must be > 0"));
        }
        if !(self.eps_div > 0.0) {
            return Err(Error::InvalidParameter("eps_div must be > 0"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub illumination: Plane,
    pub reflectance: Plane,
}

/// Outcome of the linear solve before clamping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Edge weights of the smoothness term, derived from the guide plane.
#[derive(Debug, Clone)]
pub struct SmoothnessWeights {
    width: usize,
    height: usize,
    /// `(width - 1) * height` horizontal edge weights, row-major.
    wx: Vec<f64>,
    /// `width * (height - 1)` vertical edge weights, row-major.
    wy: Vec<f64>,
}

impl SmoothnessWeights {
    pub fn from_guide(v: &Plane, eps_grad: f64) -> Self {
        let (w, h) = v.dims();
        let mut wx = Vec::with_capacity(w.saturating_sub(1) * h);
        for y in 0..h {
            for x in 0..w.saturating_sub(1) {
                wx.push(1.0 / ((v.get(x + 1, y) - v.get(x, y)).abs() + eps_grad));
            }
        }
        let mut wy = Vec::with_capacity(w * h.saturating_sub(1));
        for y in 0..h.saturating_sub(1) {
            for x in 0..w {
                wy.push(1.0 / ((v.get(x, y + 1) - v.get(x, y)).abs() + eps_grad));
            }
        }
        Self {
            width: w,
            height: h,
            wx,
            wy,
        }
    }

    /// Horizontal weight between `(x, y)` and `(x + 1, y)`.
    #[inline]
    pub fn horizontal(&self, x: usize, y: usize) -> f64 {
        self.wx[y * (self.width - 1) + x]
    }

    /// Vertical weight between `(x, y)` and `(x, y + 1)`.
    #[inline]
    pub fn vertical(&self, x: usize, y: usize) -> f64 {
        self.wy[y * self.width + x]
    }

    /// `out = (Id + lambda * D^T W D) x`
    fn apply(&self, lambda: f64, x: &[f64], out: &mut [f64]) {
        let (w, h) = (self.width, self.height);
        out.copy_from_slice(x);
        for y in 0..h {
            let row = y * w;
            for i in 0..w.saturating_sub(1) {
                let p = row + i;
                let d = lambda * self.wx[y * (w - 1) + i] * (x[p] - x[p + 1]);
                out[p] += d;
                out[p + 1] -= d;
            }
        }
        for y in 0..h.saturating_sub(1) {
            let row = y * w;
            for i in 0..w {
                let p = row + i;
                let d = lambda * self.wy[row + i] * (x[p] - x[p + w]);
                out[p] += d;
                out[p + w] -= d;
            }
        }
    }

    fn diagonal(&self, lambda: f64) -> Vec<f64> {
        let (w, h) = (self.width, self.height);
        let mut diag = vec![1.0; w * h];
        for y in 0..h {
            for i in 0..w.saturating_sub(1) {
                let c = lambda * self.wx[y * (w - 1) + i];
                diag[y * w + i] += c;
                diag[y * w + i + 1] += c;
            }
        }
        for y in 0..h.saturating_sub(1) {
            for i in 0..w {
                let c = lambda * self.wy[y * w + i];
                diag[y * w + i] += c;
                diag[(y + 1) * w + i] += c;
            }
        }
        diag
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Value of the decomposition energy for a candidate illumination.
pub fn energy(v: &Plane, weights: &SmoothnessWeights, lambda: f64, candidate: &[f64]) -> f64 {
    let (w, h) = v.dims();
    let fit: f64 = candidate
        .iter()
        .zip(v.data())
        .map(|(i, v)| (i - v) * (i - v))
        .sum();
    let mut smooth = 0.0;
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            if x + 1 < w {
                let d = candidate[p + 1] - candidate[p];
                smooth += weights.horizontal(x, y) * d * d;
            }
            if y + 1 < h {
                let d = candidate[p + w] - candidate[p];
                smooth += weights.vertical(x, y) * d * d;
            }
        }
    }
    fit + lambda * smooth
}

/// Runs the smoothness solve without the final clamp. `observe` sees the
/// initial guess and every subsequent iterate.
pub fn solve_illumination(
    v: &Plane,
    params: &DecompParams,
    mut observe: impl FnMut(&[f64]),
) -> Result<(Plane, SolveStats)> {
    params.validate()?;
    v.check_finite()?;
    let (w, h) = v.dims();
    let n = w * h;
    let weights = SmoothnessWeights::from_guide(v, params.eps_grad);
    let b = v.data();
    let b_norm = sqrt(dot(b, b));
    if b_norm == 0.0 {
        let x = vec![0.0; n];
        observe(&x);
        return Ok((
            Plane::from_parts(w, h, x),
            SolveStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }

    let inv_diag: Vec<f64> = weights
        .diagonal(params.lambda)
        .into_iter()
        .map(|d| 1.0 / d)
        .collect();
    let mut x = b.to_vec();
    let mut ap = vec![0.0; n];
    weights.apply(params.lambda, &x, &mut ap);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    observe(&x);

    let mut iterations = 0;
    let mut rel = sqrt(dot(&r, &r)) / b_norm;
    while iterations < params.max_iters && rel > params.tol {
        weights.apply(params.lambda, &p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * inv_diag[i];
        }
        iterations += 1;
        observe(&x);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rel = sqrt(dot(&r, &r)) / b_norm;
    }

    Ok((
        Plane::from_parts(w, h, x),
        SolveStats {
            iterations,
            relative_residual: rel,
        },
    ))
}

/// Smooth illumination layer, clamped so that `I >= max(V, eps_div)`.
pub fn estimate_illumination(v: &Plane, params: &DecompParams) -> Result<Plane> {
    let (smooth, _) = solve_illumination(v, params, |_| {})?;
    let floor = params.eps_div;
    smooth.zip_map(v, |i, v| i.max(v).max(floor))
}

/// `R = V / max(I, eps_div)`, clamped to `[0, 1]`.
pub fn compute_reflectance(v: &Plane, i: &Plane, params: &DecompParams) -> Result<Plane> {
    let floor = params.eps_div;
    v.zip_map(i, |v, i| (v / i.max(floor)).clamp(0.0, 1.0))
}

pub fn decompose(v: &Plane, params: &DecompParams) -> Result<Decomposition> {
    let illumination = estimate_illumination(v, params)?;
    let reflectance = compute_reflectance(v, &illumination, params)?;
    Ok(Decomposition {
        illumination,
        reflectance,
    })
}
