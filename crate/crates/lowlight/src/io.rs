//! PNG and binary PPM (P6) reading, 8-bit PNG writing, curve CSV export.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};
use lowlight_core::{MappingCurve, Plane, RgbImage};

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Unreadable { path: PathBuf, source: io::Error },
    #[error("{path}: unsupported format ({detail})")]
    Unsupported { path: PathBuf, detail: String },
    #[error("{path}: corrupt or truncated image: {detail}")]
    Corrupt { path: PathBuf, detail: String },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Png,
    Ppm,
}

fn sniff(path: &Path, bytes: &[u8]) -> Result<Format, IoError> {
    if bytes.starts_with(PNG_SIGNATURE) {
        return Ok(Format::Png);
    }
    if bytes.starts_with(b"P6") {
        return Ok(Format::Ppm);
    }
    let detail = match bytes {
        [b'P', d, ..] if d.is_ascii_digit() => {
            format!("PNM variant P{} (only binary P6 is supported)", *d as char)
        }
        _ => "not a PNG or binary PPM file".to_string(),
    };
    Err(IoError::Unsupported {
        path: path.to_path_buf(),
        detail,
    })
}

/// Decodes an in-memory PNG or P6 PPM. `path` is only used in messages.
pub fn decode_image(path: &Path, bytes: &[u8]) -> Result<RgbImage, IoError> {
    let format = sniff(path, bytes)?;
    let image_format = match format {
        Format::Png => ImageFormat::Png,
        Format::Ppm => ImageFormat::Pnm,
    };
    let decoded = image::load_from_memory_with_format(bytes, image_format).map_err(|e| match e {
        image::ImageError::Unsupported(u) => IoError::Unsupported {
            path: path.to_path_buf(),
            detail: u.to_string(),
        },
        other => IoError::Corrupt {
            path: path.to_path_buf(),
            detail: other.to_string(),
        },
    })?;
    Ok(to_planes(&decoded))
}

fn to_planes(img: &DynamicImage) -> RgbImage {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut r = Vec::with_capacity(w * h);
    let mut g = Vec::with_capacity(w * h);
    let mut b = Vec::with_capacity(w * h);
    let wide = img.color().bytes_per_pixel() / img.color().channel_count() > 1;
    if wide {
        for px in img.to_rgb16().pixels() {
            r.push(px[0] as f64 / 65535.0);
            g.push(px[1] as f64 / 65535.0);
            b.push(px[2] as f64 / 65535.0);
        }
    } else {
        for px in img.to_rgb8().pixels() {
            r.push(px[0] as f64 / 255.0);
            g.push(px[1] as f64 / 255.0);
            b.push(px[2] as f64 / 255.0);
        }
    }
    let plane = |data| Plane::new(w, h, data).expect("decoded buffer has w*h samples");
    RgbImage::new(plane(r), plane(g), plane(b)).expect("planes share dimensions")
}

/// Loads an 8- or 16-bit PNG or a binary PPM, scaled to `[0, 1]`.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage, IoError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| IoError::Unreadable {
        path: path.to_path_buf(),
        source,
    })?;
    decode_image(path, &bytes)
}

/// `round(clamp(v, 0, 1) * 255)`
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn write_png(path: &Path, w: usize, h: usize, bytes: &[u8], color: ExtendedColorType) -> Result<(), IoError> {
    let err = |source| IoError::Write {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(err)?;
    let mut out = BufWriter::new(file);
    PngEncoder::new(&mut out)
        .write_image(bytes, w as u32, h as u32, color)
        .map_err(|e| err(io::Error::other(e)))?;
    out.flush().map_err(err)
}

/// Writes an 8-bit RGB PNG.
pub fn save_image(img: &RgbImage, path: impl AsRef<Path>) -> Result<(), IoError> {
    let (w, h) = img.dims();
    let mut bytes = Vec::with_capacity(w * h * 3);
    for i in 0..w * h {
        bytes.push(quantize(img.r.data()[i]));
        bytes.push(quantize(img.g.data()[i]));
        bytes.push(quantize(img.b.data()[i]));
    }
    write_png(path.as_ref(), w, h, &bytes, ExtendedColorType::Rgb8)
}

/// Writes a single plane as an 8-bit grayscale PNG.
pub fn save_plane(p: &Plane, path: impl AsRef<Path>) -> Result<(), IoError> {
    let bytes: Vec<u8> = p.data().iter().map(|&v| quantize(v)).collect();
    write_png(path.as_ref(), p.width(), p.height(), &bytes, ExtendedColorType::L8)
}

/// 256 lines of `index,value`, no header.
pub fn format_curve_csv(curve: &MappingCurve) -> String {
    let mut s = String::with_capacity(256 * 12);
    for (l, v) in curve.lut().iter().enumerate() {
        s.push_str(&format!("{l},{v:.6}\n"));
    }
    s
}

pub fn save_curve_csv(curve: &MappingCurve, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, format_curve_csv(curve)).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}
