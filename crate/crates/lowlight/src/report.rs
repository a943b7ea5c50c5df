//! One-line JSON reports, one object per processed image.
//!
//! Keys are emitted in declaration order. Absent metrics (no reference, or
//! identical images for PSNR) are written as `null`.

use lowlight_core::pipeline::{EnhanceResult, NoiseReport, VariantScore};
use lowlight_core::MetricReport;
use serde::Serialize;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EnhanceLine {
    pub file: String,
    pub output: String,
    pub psnr_db: Option<f64>,
    pub ssim: Option<f64>,
    pub mean_luma: f64,
    pub std_luma: f64,
    pub sigma_estimate: f64,
    pub sigma_used: f64,
    pub threshold: f64,
}

impl EnhanceLine {
    pub fn new(file: String, output: String, metrics: &MetricReport, result: &EnhanceResult) -> Self {
        Self {
            file,
            output,
            psnr_db: metrics.psnr_db,
            ssim: metrics.ssim,
            mean_luma: metrics.mean_luma,
            std_luma: metrics.std_luma,
            sigma_estimate: metrics.sigma_estimate,
            sigma_used: result.sigma_used,
            threshold: result.threshold_used,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct VariantLine {
    pub psnr_db: Option<f64>,
    pub ssim: f64,
    pub mean_luma: f64,
    pub sigma_estimate: f64,
}

impl From<&VariantScore> for VariantLine {
    fn from(s: &VariantScore) -> Self {
        Self {
            psnr_db: s.psnr_db.is_finite().then_some(s.psnr_db),
            ssim: s.ssim,
            mean_luma: s.mean_luma,
            sigma_estimate: s.sigma_estimate,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CompareLine {
    pub file: String,
    pub output: String,
    pub mode: &'static str,
    pub full: VariantLine,
    pub agcwd_only: VariantLine,
    pub sigma_used: f64,
    pub threshold: f64,
}

impl CompareLine {
    pub fn new(file: String, output: String, report: &NoiseReport) -> Self {
        Self {
            file,
            output,
            mode: "compare",
            full: (&report.full).into(),
            agcwd_only: (&report.agcwd_only).into(),
            sigma_used: report.full_result.sigma_used,
            threshold: report.full_result.threshold_used,
        }
    }
}

pub fn to_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report structs always serialize")
}
