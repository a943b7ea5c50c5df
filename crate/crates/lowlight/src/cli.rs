//! Batch command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use lowlight_core::pipeline::{compare_noise_amplification, enhance_image};
use lowlight_core::{Bm3dParams, DecompParams, EnhanceParams, MetricReport, PipelineParams, RgbImage, Sigma};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::io::{self, IoError};
use crate::report::{to_line, CompareLine, EnhanceLine};

/// Noise-aware enhancement of underexposed images.
///
/// Each input (a PNG / binary PPM file, or a directory of them) is written to
/// `<out>/<stem>.enhanced.png` and one JSON metrics line is printed per file.
#[derive(Debug, Clone, Parser, PartialEq)]
#[command(name = "lowlight", version)]
pub struct CliConfig {
    /// Input files or directories.
    #[arg(required = true, value_name = "INPUT")]
    pub inputs: Vec<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long = "out", value_name = "DIR", default_value = ".")]
    pub output_dir: PathBuf,

    /// Percentile bounding the set averaged for the curve threshold, in (0, 100).
    #[arg(long, default_value_t = 75.0, value_parser = parse_percentile)]
    pub percentile: f64,

    /// Weighting-distribution exponent of the gamma curve, in [0, 1].
    #[arg(long, default_value_t = 0.5, value_parser = parse_alpha)]
    pub alpha: f64,

    /// Smoothness weight of the illumination estimate (> 0).
    #[arg(long, default_value_t = 0.15, value_parser = parse_lambda)]
    pub lambda: f64,

    /// Luma noise level in [0, 1], or `auto` to estimate it.
    #[arg(long, default_value = "auto", value_parser = parse_sigma)]
    pub sigma: Sigma,

    /// Skip luma denoising (takes precedence over --sigma).
    #[arg(long)]
    pub no_denoise: bool,

    /// Also write <stem>.illum.png, <stem>.refl.png, <stem>.illum-enh.png and <stem>.curve.csv.
    #[arg(long)]
    pub keep_intermediates: bool,

    /// Compare against plain AGCWD; needs --reference.
    #[arg(long = "compare", requires = "reference")]
    pub compare_mode: bool,

    /// Clean reference image for PSNR / SSIM.
    #[arg(long, value_name = "PATH")]
    pub reference: Option<PathBuf>,

    /// Standard deviation of Gaussian noise added to inputs in compare mode.
    #[arg(long, default_value_t = 0.0, value_parser = parse_unit)]
    pub noise_sigma: f64,

    /// Seed for noise injection.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (0 = one per core). Output is identical for any value.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{s}` is not a number"))
}

fn parse_percentile(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v < 100.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 100)"))
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn parse_unit(s: &str) -> Result<f64, String> {
    parse_alpha(s)
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be > 0"))
    }
}

fn parse_sigma(s: &str) -> Result<Sigma, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Sigma::Auto);
    }
    parse_unit(s).map(Sigma::Fixed)
}

/// Parses process arguments (`argv[0]` is the program name).
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    CliConfig::try_parse_from(argv)
}

impl CliConfig {
    pub fn pipeline_params(&self) -> PipelineParams {
        PipelineParams {
            decomp: DecompParams {
                lambda: self.lambda,
                ..DecompParams::default()
            },
            enhance: EnhanceParams {
                percentile: self.percentile,
                alpha: self.alpha,
            },
            bm3d: Bm3dParams {
                sigma: self.sigma,
                ..Bm3dParams::default()
            },
            enhance_enabled: true,
            denoise_enabled: !self.no_denoise,
            keep_intermediates: self.keep_intermediates,
        }
    }
}

fn is_supported(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("png" | "ppm")
    )
}

/// Expands directories into their PNG / PPM files (sorted); files pass
/// through unchanged so that unreadable paths are reported per file.
pub fn expand_inputs(inputs: &[PathBuf]) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(input)
                .into_iter()
                .flatten()
                .flatten()
                .map(|e| e.path())
                .filter(|p| p.is_file() && is_supported(p))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(input.clone());
        }
    }
    out
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string())
}

#[derive(Debug, thiserror::Error)]
enum FileError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{path}: {source}")]
    Pipeline {
        path: PathBuf,
        source: lowlight_core::Error,
    },
}

fn add_noise(img: &RgbImage, sigma: f64, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    let mut noisy = img.clone();
    for plane in [&mut noisy.r, &mut noisy.g, &mut noisy.b] {
        let data: Vec<f64> = plane
            .data()
            .iter()
            .map(|&v| (v + normal.sample(&mut rng)).clamp(0.0, 1.0))
            .collect();
        *plane = lowlight_core::Plane::new(plane.width(), plane.height(), data)
            .expect("same shape, finite samples");
    }
    noisy
}

fn process_file(
    config: &CliConfig,
    params: &PipelineParams,
    reference: Option<&RgbImage>,
    index: usize,
    input: &Path,
) -> Result<String, FileError> {
    let pipeline_err = |source| FileError::Pipeline {
        path: input.to_path_buf(),
        source,
    };
    let mut img = io::load_image(input)?;
    let name = stem(input);
    let output = config.output_dir.join(format!("{name}.enhanced.png"));
    let file = input.display().to_string();
    let out_name = output.display().to_string();

    let (result, line) = if config.compare_mode {
        let reference = reference.expect("compare mode requires a reference");
        if config.noise_sigma > 0.0 {
            img = add_noise(&img, config.noise_sigma, config.seed.wrapping_add(index as u64));
        }
        let report = compare_noise_amplification(&img, reference, params).map_err(pipeline_err)?;
        let line = to_line(&CompareLine::new(file, out_name, &report));
        (report.full_result, line)
    } else {
        let result = enhance_image(&img, params).map_err(pipeline_err)?;
        let metrics = MetricReport::measure(&result.output, reference).map_err(pipeline_err)?;
        let line = to_line(&EnhanceLine::new(file, out_name, &metrics, &result));
        (result, line)
    };

    io::save_image(&result.output, &output)?;
    if config.keep_intermediates {
        let dir = &config.output_dir;
        io::save_plane(&result.illumination, dir.join(format!("{name}.illum.png")))?;
        io::save_plane(&result.reflectance, dir.join(format!("{name}.refl.png")))?;
        io::save_plane(
            &result.illumination_enhanced,
            dir.join(format!("{name}.illum-enh.png")),
        )?;
        io::save_curve_csv(&result.curve, dir.join(format!("{name}.curve.csv")))?;
    }
    Ok(line)
}

/// Processes every input, writing metric lines to `out` in input order and
/// per-file failures to `err`. Returns the process exit code: 0 iff every
/// input produced an output file.
pub fn run_with(config: &CliConfig, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let params = config.pipeline_params();
    if let Err(e) = params.validate() {
        let _ = writeln!(err, "error: {e}");
        return 2;
    }
    if let Err(e) = fs::create_dir_all(&config.output_dir) {
        let _ = writeln!(err, "error: cannot create {}: {e}", config.output_dir.display());
        return 1;
    }
    let reference = match &config.reference {
        Some(path) => match io::load_image(path) {
            Ok(img) => Some(img),
            Err(e) => {
                let _ = writeln!(err, "error: reference: {e}");
                return 1;
            }
        },
        None => None,
    };

    let inputs = expand_inputs(&config.inputs);
    if inputs.is_empty() {
        let _ = writeln!(err, "error: no input images found");
        return 1;
    }
    let work = || -> Vec<Result<String, FileError>> {
        inputs
            .par_iter()
            .enumerate()
            .map(|(i, path)| process_file(config, &params, reference.as_ref(), i, path))
            .collect()
    };
    let results = match rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };

    let mut failures = 0;
    for (path, result) in inputs.iter().zip(results) {
        match result {
            Ok(line) => {
                let _ = writeln!(out, "{line}");
            }
            Err(e) => {
                failures += 1;
                let _ = writeln!(err, "error: {}: {e}", path.display());
            }
        }
    }
    if failures == 0 {
        0
    } else {
        1
    }
}

pub fn run(config: &CliConfig) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(config, &mut stdout.lock(), &mut stderr.lock())
}
