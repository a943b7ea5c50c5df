//! Full-reference PSNR / SSIM and simple luma statistics.

use alloc::vec::Vec;

use crate::denoise::estimate_sigma;
use crate::error::{Error, Result};
use crate::image::{Plane, RgbImage};
use crate::math::{exp, log10, sqrt};

/// Per-image quality summary. `psnr_db` is `None` when there is no
/// reference or the images are identical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub psnr_db: Option<f64>,
    pub ssim: Option<f64>,
    pub mean_luma: f64,
    pub std_luma: f64,
    pub sigma_estimate: f64,
}

impl MetricReport {
    /// No-reference statistics of `img`, plus PSNR / SSIM on luma when a
    /// reference is given.
    pub fn measure(img: &RgbImage, reference: Option<&RgbImage>) -> Result<Self> {
        let stats = luma_stats(img)?;
        let (psnr_db, ssim) = match reference {
            Some(r) => {
                let p = psnr_rgb(img, r)?;
                let s = ssim(&img.luma(), &r.luma())?;
                (p.is_finite().then_some(p), Some(s))
            }
            None => (None, None),
        };
        Ok(Self {
            psnr_db,
            ssim,
            mean_luma: stats.mean,
            std_luma: stats.std,
            sigma_estimate: stats.sigma_estimate,
        })
    }
}

fn mse(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for (a, b) in pairs {
        sum += (a - b) * (a - b);
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * log10(1.0 / mse)
    }
}

/// `10 log10(1 / MSE)` in dB; identical planes give `+inf`.
pub fn psnr(a: &Plane, b: &Plane) -> Result<f64> {
    a.check_same_dims(b)?;
    Ok(psnr_from_mse(mse(
        a.data().iter().copied().zip(b.data().iter().copied()),
    )))
}

/// PSNR with the MSE pooled over all three channels.
pub fn psnr_rgb(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    a.r.check_same_dims(&b.r)?;
    let pairs = a
        .planes()
        .into_iter()
        .zip(b.planes())
        .flat_map(|(pa, pb)| pa.data().iter().copied().zip(pb.data().iter().copied()));
    Ok(psnr_from_mse(mse(pairs)))
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = exp(-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA));
    }
    let sum: f64 = w.iter().sum();
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Valid-mode separable filtering with a symmetric 1D kernel.
fn filter_valid(p: &[f64], w: usize, h: usize, k: &[f64]) -> (Vec<f64>, usize, usize) {
    let n = k.len();
    let (ow, oh) = (w + 1 - n, h + 1 - n);
    let mut rows = Vec::with_capacity(ow * h);
    for y in 0..h {
        for x in 0..ow {
            rows.push((0..n).map(|i| k[i] * p[y * w + x + i]).sum::<f64>());
        }
    }
    let mut out = Vec::with_capacity(ow * oh);
    for y in 0..oh {
        for x in 0..ow {
            out.push((0..n).map(|i| k[i] * rows[(y + i) * ow + x]).sum::<f64>());
        }
    }
    (out, ow, oh)
}

/// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03 and dynamic range 1, averaged over all fully-inside windows.
pub fn ssim(a: &Plane, b: &Plane) -> Result<f64> {
    a.check_same_dims(b)?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::TooSmall {
            min: (SSIM_WINDOW, SSIM_WINDOW),
            found: (w, h),
        });
    }
    let k = gaussian_window();
    let (x, y) = (a.data(), b.data());
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let (mu_x, _, _) = filter_valid(x, w, h, &k);
    let (mu_y, _, _) = filter_valid(y, w, h, &k);
    let (e_xx, _, _) = filter_valid(&xx, w, h, &k);
    let (e_yy, _, _) = filter_valid(&yy, w, h, &k);
    let (e_xy, _, _) = filter_valid(&xy, w, h, &k);

    let c1 = K1 * K1;
    let c2 = K2 * K2;
    let mut total = 0.0;
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let var_x = e_xx[i] - mx * mx;
        let var_y = e_yy[i] - my * my;
        let cov = e_xy[i] - mx * my;
        total += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
            / ((mx * mx + my * my + c1) * (var_x + var_y + c2));
    }
    Ok((total / mu_x.len() as f64).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumaStats {
    pub mean: f64,
    pub std: f64,
    pub sigma_estimate: f64,
}

/// Mean and (population) standard deviation of BT.601 luma, with the MAD
/// noise estimate. Images smaller than 3x3 report a zero noise estimate.
pub fn luma_stats(img: &RgbImage) -> Result<LumaStats> {
    let y = img.luma();
    let mean = y.mean();
    let var = if y.is_empty() {
        0.0
    } else {
        y.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / y.len() as f64
    };
    let sigma_estimate = match estimate_sigma(&y) {
        Ok(s) => s,
        Err(Error::TooSmall { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(LumaStats {
        mean,
        std: sqrt(var),
        sigma_estimate,
    })
}
