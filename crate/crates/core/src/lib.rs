//! Noise-aware contrast enhancement for underexposed images.
//!
//! The brightness channel of an image is split into a smooth illumination
//! layer and a reflectance layer. Only the illumination is tone-mapped, with
//! an adaptive gamma curve that is spliced into the identity above an
//! image-dependent threshold so that bright regions are left untouched.
//! Noise lifted out of the shadows is then removed from the luma channel with
//! a two-stage BM3D filter.
//!
//! This crate is `no_std` (it needs `alloc`) and performs no IO. File formats
//! and the command-line front end live in the `lowlight` crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

pub mod denoise;
pub mod enhance;
mod error;
pub mod image;
mod math;
pub mod metrics;
pub mod pipeline;
pub mod retinex;
pub mod synthetic;

pub use denoise::{Bm3dParams, Sigma};
pub use enhance::{EnhanceParams, MappingCurve};
pub use error::{Error, Result};
pub use image::{HsvImage, Plane, RgbImage, YuvImage};
pub use metrics::MetricReport;
pub use pipeline::{EnhanceResult, PipelineParams};
pub use retinex::{DecompParams, Decomposition};
