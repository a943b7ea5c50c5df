//! Two-stage BM3D denoising of a single plane, plus a blind noise estimate.
//!
//! Both stages group similar blocks by exhaustive search in a window around
//! each reference block, filter the group in a separable 3D transform domain
//! (orthonormal 2D DCT-II per block, orthonormal Haar across the group) and
//! average the overlapping estimates back into the image. The first stage
//! hard-thresholds the spectrum; the second uses the first-stage result as a
//! pilot for empirical Wiener shrinkage.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image::Plane;
use crate::math::{cos, sqrt};

/// Noise standard deviation in `[0, 1]` sample units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    /// Estimate from the input with [`estimate_sigma`].
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm3dParams {
    pub block_size: usize,
    /// Side of the square search window centred on the reference block (odd).
    pub search_window: usize,
    /// Upper bound on group size; must be a power of two.
    pub max_matches: usize,
    /// Spacing of reference blocks.
    pub step: usize,
    /// Mean squared block distance accepted during the hard-threshold stage.
    pub match_threshold_ht: f64,
    /// Mean squared block distance accepted during the Wiener stage.
    pub match_threshold_wie: f64,
    /// Hard threshold as a multiple of sigma.
    pub lambda3d: f64,
    pub sigma: Sigma,
}

impl Default for Bm3dParams {
    fn default() -> Self {
        Self {
            block_size: 8,
            search_window: 39,
            max_matches: 16,
            step: 3,
            // 2500 and 400 on the 8-bit scale.
            match_threshold_ht: 2500.0 / (255.0 * 255.0),
            match_threshold_wie: 400.0 / (255.0 * 255.0),
            lambda3d: 2.7,
            sigma: Sigma::Auto,
        }
    }
}

impl Bm3dParams {
    pub fn validate(&self) -> Result<()> {
        if self.block_size < 4 {
            return Err(Error::InvalidParameter("block_size must be >= 4"));
        }
        if !self.max_matches.is_power_of_two() {
            return Err(Error::InvalidParameter("max_matches must be a power of two"));
        }
        if self.search_window % 2 != 1 || self.search_window <= self.block_size {
            return Err(Error::InvalidParameter(
                "search_window must be odd and larger than block_size",
            ));
        }
        if self.step == 0 {
            return Err(Error::InvalidParameter("step must be >= 1"));
        }
        if !(self.lambda3d >= 0.0) {
            return Err(Error::InvalidParameter("lambda3d must be >= 0"));
        }
        if let Sigma::Fixed(s) = self.sigma {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidParameter("sigma must be in [0, 1]"));
            }
        }
        Ok(())
    }

    fn with_sigma(&self, sigma: f64) -> Self {
        Self {
            sigma: Sigma::Fixed(sigma),
            ..*self
        }
    }
}

/// Gaussian MAD estimate of the noise level.
///
/// The plane is filtered with the separable second-difference kernel
/// `[1 -2 1]^T [1 -2 1]` (L2 norm 6) over interior positions, and
/// `sigma = median(|response|) / (0.6745 * 6)`.
pub fn estimate_sigma(y: &Plane) -> Result<f64> {
    let (w, h) = y.dims();
    if w < 3 || h < 3 {
        return Err(Error::TooSmall {
            min: (3, 3),
            found: (w, h),
        });
    }
    const KERNEL: [[f64; 3]; 3] = [[1.0, -2.0, 1.0], [-2.0, 4.0, -2.0], [1.0, -2.0, 1.0]];
    const KERNEL_NORM: f64 = 6.0;
    let mut responses = Vec::with_capacity((w - 2) * (h - 2));
    for cy in 1..h - 1 {
        for cx in 1..w - 1 {
            let mut acc = 0.0;
            for (ky, row) in KERNEL.iter().enumerate() {
                for (kx, k) in row.iter().enumerate() {
                    acc += k * y.get(cx + kx - 1, cy + ky - 1);
                }
            }
            responses.push(acc.abs());
        }
    }
    let median = median(&mut responses);
    Ok((median / (0.6745 * KERNEL_NORM)).clamp(0.0, 1.0))
}

fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    values.sort_unstable_by(f64::total_cmp);
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Orthonormal DCT-II basis, `basis[k * n + i]`.
fn dct_basis(n: usize) -> Vec<f64> {
    let mut basis = vec![0.0; n * n];
    for k in 0..n {
        let scale = if k == 0 {
            sqrt(1.0 / n as f64)
        } else {
            sqrt(2.0 / n as f64)
        };
        for i in 0..n {
            basis[k * n + i] = scale * cos(PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64);
        }
    }
    basis
}

/// Separable 2D transform of one `n x n` block in place. `forward` applies
/// `C X C^T`, otherwise `C^T X C`.
fn dct2(basis: &[f64], n: usize, block: &mut [f64], scratch: &mut [f64], forward: bool) {
    let c = |k: usize, i: usize| {
        if forward {
            basis[k * n + i]
        } else {
            basis[i * n + k]
        }
    };
    // rows
    for r in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += c(k, i) * block[r * n + i];
            }
            scratch[r * n + k] = acc;
        }
    }
    // columns
    for col in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += c(k, i) * scratch[i * n + col];
            }
            block[k * n + col] = acc;
        }
    }
}

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Orthonormal multi-level Haar transform of a power-of-two length signal.
fn haar_forward(x: &mut [f64], tmp: &mut [f64]) {
    let mut len = x.len();
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            let (a, b) = (x[2 * i], x[2 * i + 1]);
            tmp[i] = (a + b) * FRAC_1_SQRT_2;
            tmp[half + i] = (a - b) * FRAC_1_SQRT_2;
        }
        x[..len].copy_from_slice(&tmp[..len]);
        len = half;
    }
}

fn haar_inverse(x: &mut [f64], tmp: &mut [f64]) {
    let n = x.len();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        for i in 0..half {
            let (a, d) = (x[i], x[half + i]);
            tmp[2 * i] = (a + d) * FRAC_1_SQRT_2;
            tmp[2 * i + 1] = (a - d) * FRAC_1_SQRT_2;
        }
        x[..len].copy_from_slice(&tmp[..len]);
        len *= 2;
    }
}

/// Reference block coordinates along one axis: every `step` pixels, with the
/// last admissible position always included.
fn grid(extent: usize, block: usize, step: usize) -> Vec<usize> {
    let last = extent - block;
    let mut out: Vec<usize> = (0..=last).step_by(step).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

/// A reference block and its matches, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGroup {
    pub reference: (usize, usize),
    /// `(x, y)` of every member; the reference comes first.
    pub members: Vec<(usize, usize)>,
    pub distances: Vec<f64>,
}

fn block_distance(p: &Plane, n: usize, a: (usize, usize), b: (usize, usize), limit: f64) -> f64 {
    let w = p.width();
    let data = p.data();
    let mut acc = 0.0;
    for r in 0..n {
        let ra = (a.1 + r) * w + a.0;
        let rb = (b.1 + r) * w + b.0;
        for c in 0..n {
            let d = data[ra + c] - data[rb + c];
            acc += d * d;
        }
        if acc > limit {
            return f64::INFINITY;
        }
    }
    acc
}

/// Exhaustive block matching around `reference` in `p`.
///
/// Candidates whose mean squared difference exceeds `threshold` are dropped;
/// the nearest `max_matches` are kept and the count is rounded down to a
/// power of two.
pub fn match_blocks(
    p: &Plane,
    reference: (usize, usize),
    params: &Bm3dParams,
    threshold: f64,
) -> BlockGroup {
    let n = params.block_size;
    let (w, h) = p.dims();
    let half = params.search_window / 2;
    let x0 = reference.0.saturating_sub(half);
    let y0 = reference.1.saturating_sub(half);
    let x1 = (reference.0 + half).min(w - n);
    let y1 = (reference.1 + half).min(h - n);
    let limit = threshold * (n * n) as f64;

    let mut found: Vec<(f64, (usize, usize))> = Vec::new();
    for cy in y0..=y1 {
        for cx in x0..=x1 {
            if (cx, cy) == reference {
                continue;
            }
            let d = block_distance(p, n, reference, (cx, cy), limit);
            if d <= limit {
                found.push((d / (n * n) as f64, (cx, cy)));
            }
        }
    }
    found.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1 .1.cmp(&b.1 .1))
            .then(a.1 .0.cmp(&b.1 .0))
    });
    let available = (found.len() + 1).min(params.max_matches);
    let keep = prev_power_of_two(available);

    let mut members = Vec::with_capacity(keep);
    let mut distances = Vec::with_capacity(keep);
    members.push(reference);
    distances.push(0.0);
    for &(d, pos) in found.iter().take(keep - 1) {
        members.push(pos);
        distances.push(d);
    }
    BlockGroup {
        reference,
        members,
        distances,
    }
}

fn prev_power_of_two(k: usize) -> usize {
    if k == 0 {
        return 0;
    }
    1 << (usize::BITS - 1 - k.leading_zeros())
}

/// Shared state for one filtering pass.
struct Transform3d {
    n: usize,
    basis: Vec<f64>,
    scratch: Vec<f64>,
    column: Vec<f64>,
    column_tmp: Vec<f64>,
}

impl Transform3d {
    fn new(n: usize, max_group: usize) -> Self {
        Self {
            n,
            basis: dct_basis(n),
            scratch: vec![0.0; n * n],
            column: vec![0.0; max_group],
            column_tmp: vec![0.0; max_group],
        }
    }

    fn gather(&self, p: &Plane, group: &BlockGroup, out: &mut Vec<f64>) {
        let n = self.n;
        out.clear();
        for &(x, y) in &group.members {
            for r in 0..n {
                let start = (y + r) * p.width() + x;
                out.extend_from_slice(&p.data()[start..start + n]);
            }
        }
    }

    fn forward(&mut self, stack: &mut [f64]) {
        let nn = self.n * self.n;
        let k = stack.len() / nn;
        for block in stack.chunks_exact_mut(nn) {
            dct2(&self.basis, self.n, block, &mut self.scratch, true);
        }
        if k > 1 {
            for c in 0..nn {
                for m in 0..k {
                    self.column[m] = stack[m * nn + c];
                }
                haar_forward(&mut self.column[..k], &mut self.column_tmp);
                for m in 0..k {
                    stack[m * nn + c] = self.column[m];
                }
            }
        }
    }

    fn inverse(&mut self, stack: &mut [f64]) {
        let nn = self.n * self.n;
        let k = stack.len() / nn;
        if k > 1 {
            for c in 0..nn {
                for m in 0..k {
                    self.column[m] = stack[m * nn + c];
                }
                haar_inverse(&mut self.column[..k], &mut self.column_tmp);
                for m in 0..k {
                    stack[m * nn + c] = self.column[m];
                }
            }
        }
        for block in stack.chunks_exact_mut(nn) {
            dct2(&self.basis, self.n, block, &mut self.scratch, false);
        }
    }
}

struct Accumulator {
    width: usize,
    numerator: Vec<f64>,
    denominator: Vec<f64>,
}

impl Accumulator {
    fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            numerator: vec![0.0; width * height],
            denominator: vec![0.0; width * height],
        }
    }

    fn add(&mut self, n: usize, group: &BlockGroup, stack: &[f64], weight: f64) {
        let nn = n * n;
        for (m, &(x, y)) in group.members.iter().enumerate() {
            let block = &stack[m * nn..(m + 1) * nn];
            for r in 0..n {
                let row = (y + r) * self.width + x;
                for c in 0..n {
                    self.numerator[row + c] += weight * block[r * n + c];
                    self.denominator[row + c] += weight;
                }
            }
        }
    }

    fn finish(self, fallback: &Plane) -> Plane {
        let data = self
            .numerator
            .iter()
            .zip(&self.denominator)
            .zip(fallback.data())
            .map(|((&num, &den), &orig)| {
                if den > 0.0 {
                    (num / den).clamp(0.0, 1.0)
                } else {
                    orig
                }
            })
            .collect();
        Plane::from_parts(fallback.width(), fallback.height(), data)
    }
}

fn check_size(y: &Plane, n: usize) -> Result<()> {
    if y.width() < n || y.height() < n {
        return Err(Error::TooSmall {
            min: (n, n),
            found: y.dims(),
        });
    }
    Ok(())
}

fn fixed_sigma(y: &Plane, params: &Bm3dParams) -> Result<f64> {
    match params.sigma {
        Sigma::Fixed(s) => Ok(s),
        Sigma::Auto => estimate_sigma(y),
    }
}

/// First stage: collaborative hard thresholding.
///
/// `sigma <= 0` returns the input unchanged. With `Sigma::Auto` the level is
/// estimated from `y`.
pub fn bm3d_hard(y: &Plane, params: &Bm3dParams) -> Result<Plane> {
    params.validate()?;
    let sigma = fixed_sigma(y, params)?;
    if sigma <= 0.0 {
        return Ok(y.clone());
    }
    let n = params.block_size;
    check_size(y, n)?;
    let (w, h) = y.dims();
    let threshold = params.lambda3d * sigma;
    let mut transform = Transform3d::new(n, params.max_matches);
    let mut acc = Accumulator::new(w, h);
    let mut stack = Vec::with_capacity(params.max_matches * n * n);

    for &ry in &grid(h, n, params.step) {
        for &rx in &grid(w, n, params.step) {
            let group = match_blocks(y, (rx, ry), params, params.match_threshold_ht);
            transform.gather(y, &group, &mut stack);
            transform.forward(&mut stack);
            let mut retained = 0usize;
            for (idx, c) in stack.iter_mut().enumerate() {
                if idx == 0 {
                    retained += 1;
                } else if c.abs() < threshold {
                    *c = 0.0;
                } else {
                    retained += 1;
                }
            }
            transform.inverse(&mut stack);
            acc.add(n, &group, &stack, 1.0 / retained.max(1) as f64);
        }
    }
    Ok(acc.finish(y))
}

/// Second stage: empirical Wiener filtering guided by the first-stage
/// estimate `y_basic`. `sigma <= 0` returns `y_basic`.
pub fn bm3d_wiener(y_noisy: &Plane, y_basic: &Plane, params: &Bm3dParams) -> Result<Plane> {
    params.validate()?;
    y_noisy.check_same_dims(y_basic)?;
    let sigma = fixed_sigma(y_noisy, params)?;
    if sigma <= 0.0 {
        return Ok(y_basic.clone());
    }
    let n = params.block_size;
    check_size(y_noisy, n)?;
    let (w, h) = y_noisy.dims();
    let noise_var = sigma * sigma;
    let mut transform = Transform3d::new(n, params.max_matches);
    let mut acc = Accumulator::new(w, h);
    let mut basic = Vec::with_capacity(params.max_matches * n * n);
    let mut noisy = Vec::with_capacity(params.max_matches * n * n);

    for &ry in &grid(h, n, params.step) {
        for &rx in &grid(w, n, params.step) {
            let group = match_blocks(y_basic, (rx, ry), params, params.match_threshold_wie);
            transform.gather(y_basic, &group, &mut basic);
            transform.gather(y_noisy, &group, &mut noisy);
            transform.forward(&mut basic);
            transform.forward(&mut noisy);
            let mut energy = 0.0;
            for (idx, (c, &b)) in noisy.iter_mut().zip(&basic).enumerate() {
                let b2 = b * b;
                // group DC passes unshrunk, as in the hard stage
                let gain = if idx == 0 { 1.0 } else { b2 / (b2 + noise_var) };
                *c *= gain;
                energy += gain * gain;
            }
            transform.inverse(&mut noisy);
            acc.add(n, &group, &noisy, 1.0 / energy.max(1e-12));
        }
    }
    Ok(acc.finish(y_basic))
}

/// Resolves `Sigma::Auto` against `y`.
pub fn resolve_sigma(y: &Plane, params: &Bm3dParams) -> Result<f64> {
    fixed_sigma(y, params)
}

/// Full two-stage denoising of a luma plane.
pub fn denoise_luma(y: &Plane, params: &Bm3dParams) -> Result<Plane> {
    params.validate()?;
    let sigma = resolve_sigma(y, params)?;
    if sigma <= 0.0 {
        return Ok(y.clone());
    }
    let fixed = params.with_sigma(sigma);
    let basic = bm3d_hard(y, &fixed)?;
    bm3d_wiener(y, &basic, &fixed)
}
