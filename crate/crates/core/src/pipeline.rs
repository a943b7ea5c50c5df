//! End-to-end enhancement.
//!
//! RGB -> HSV, decompose V into illumination and reflectance, tone-map the
//! illumination, recompose V' = I' * R, back to RGB with the original hue and
//! saturation, then denoise only the luma of the BT.601 YUV form and return
//! to RGB.

use crate::denoise::{self, Bm3dParams, Sigma};
use crate::enhance::{self, EnhanceParams, MappingCurve};
use crate::error::{Error, Result};
use crate::image::{self, HsvImage, Plane, RgbImage, YuvImage};
use crate::metrics::{self, psnr_rgb, ssim};
use crate::retinex::{self, DecompParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineParams {
    pub decomp: DecompParams,
    pub enhance: EnhanceParams,
    pub bm3d: Bm3dParams,
    /// When false the tone curve is forced to the identity.
    pub enhance_enabled: bool,
    pub denoise_enabled: bool,
    /// Ask front ends to export intermediate layers. The pipeline itself
    /// always fills every field of [`EnhanceResult`].
    pub keep_intermediates: bool,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            decomp: DecompParams::default(),
            enhance: EnhanceParams::default(),
            bm3d: Bm3dParams::default(),
            enhance_enabled: true,
            denoise_enabled: true,
            keep_intermediates: false,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        self.decomp.validate()?;
        self.enhance.validate()?;
        self.bm3d.validate()
    }
}

/// Final image and every intermediate layer.
#[derive(Debug, Clone, PartialEq)]
pub struct EnhanceResult {
    pub output: RgbImage,
    pub illumination: Plane,
    pub reflectance: Plane,
    pub illumination_enhanced: Plane,
    pub v_enhanced: Plane,
    /// Input hue and saturation with the enhanced brightness.
    pub hsv_enhanced: HsvImage,
    /// RGB image before luma denoising.
    pub pre_denoise: RgbImage,
    pub curve: MappingCurve,
    /// Noise level handed to the denoiser; 0 when denoising is off.
    pub sigma_used: f64,
    pub threshold_used: f64,
}

/// `V' = I' * R`, clamped to `[0, 1]`.
pub fn recompose_v(i_enh: &Plane, r: &Plane) -> Result<Plane> {
    i_enh.zip_map(r, |i, r| (i * r).clamp(0.0, 1.0))
}

pub fn enhance_image(img: &RgbImage, params: &PipelineParams) -> Result<EnhanceResult> {
    params.validate()?;
    for p in img.planes() {
        p.check_finite()?;
    }
    if params.denoise_enabled {
        let n = params.bm3d.block_size;
        if img.width() < n || img.height() < n {
            return Err(Error::TooSmall {
                min: (n, n),
                found: img.dims(),
            });
        }
    }

    let hsv = image::rgb_to_hsv(img);
    let decomposition = retinex::decompose(&hsv.v, &params.decomp)?;
    let curve = if params.enhance_enabled {
        enhance::build_mapping_curve(&decomposition.illumination, &params.enhance)?
    } else {
        MappingCurve::identity()
    };
    let illumination_enhanced = enhance::apply_curve(&decomposition.illumination, &curve);
    let v_enhanced = recompose_v(&illumination_enhanced, &decomposition.reflectance)?;
    let hsv_enhanced = HsvImage {
        h: hsv.h,
        s: hsv.s,
        v: v_enhanced.clone(),
    };
    let pre_denoise = image::hsv_to_rgb(&hsv_enhanced);

    let (output, sigma_used) = if params.denoise_enabled {
        let yuv = image::rgb_to_yuv(&pre_denoise);
        let sigma = denoise::resolve_sigma(&yuv.y, &params.bm3d)?;
        let bm3d = Bm3dParams {
            sigma: Sigma::Fixed(sigma),
            ..params.bm3d
        };
        let y = denoise::denoise_luma(&yuv.y, &bm3d)?;
        let out = image::yuv_to_rgb(&YuvImage {
            y,
            u: yuv.u,
            v: yuv.v,
        });
        (out, sigma)
    } else {
        (pre_denoise.clone(), 0.0)
    };

    Ok(EnhanceResult {
        output,
        illumination: decomposition.illumination,
        reflectance: decomposition.reflectance,
        illumination_enhanced,
        v_enhanced,
        hsv_enhanced,
        pre_denoise,
        threshold_used: curve.threshold(),
        curve,
        sigma_used,
    })
}

/// Plain AGCWD on the HSV brightness: full-range curve, no decomposition,
/// no threshold, no denoising.
pub fn agcwd_only(img: &RgbImage, alpha: f64) -> Result<RgbImage> {
    let hsv = image::rgb_to_hsv(img);
    let curve = match enhance::build_agcwd_curve(&hsv.v, alpha) {
        Ok(lut) => MappingCurve::from_lut(lut, 255.0),
        Err(Error::DegenerateHistogram) => MappingCurve::identity(),
        Err(e) => return Err(e),
    };
    let v = enhance::apply_curve(&hsv.v, &curve);
    Ok(image::hsv_to_rgb(&HsvImage { v, ..hsv }))
}

/// Scores of one enhancement variant against a clean reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantScore {
    /// `+inf` when the output equals the reference.
    pub psnr_db: f64,
    /// SSIM of BT.601 luma.
    pub ssim: f64,
    pub mean_luma: f64,
    pub sigma_estimate: f64,
}

impl VariantScore {
    fn score(out: &RgbImage, reference: &RgbImage) -> Result<Self> {
        let stats = metrics::luma_stats(out)?;
        Ok(Self {
            psnr_db: psnr_rgb(out, reference)?,
            ssim: ssim(&out.luma(), &reference.luma())?,
            mean_luma: stats.mean,
            sigma_estimate: stats.sigma_estimate,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReport {
    pub full: VariantScore,
    pub agcwd_only: VariantScore,
    pub full_result: EnhanceResult,
    pub agcwd_output: RgbImage,
}

/// Runs the full pipeline and the AGCWD-only baseline on `img` and scores
/// both against the clean `reference`.
pub fn compare_noise_amplification(
    img: &RgbImage,
    reference: &RgbImage,
    params: &PipelineParams,
) -> Result<NoiseReport> {
    img.r.check_same_dims(&reference.r)?;
    let full_result = enhance_image(img, params)?;
    let agcwd_output = agcwd_only(img, params.enhance.alpha)?;
    Ok(NoiseReport {
        full: VariantScore::score(&full_result.output, reference)?,
        agcwd_only: VariantScore::score(&agcwd_output, reference)?,
        full_result,
        agcwd_output,
    })
}
