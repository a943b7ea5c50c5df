//! Image containers and color-space conversions.
//!
//! Samples are `f64` in nominal range `[0, 1]`, stored row-major.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// BT.601 luma weights.
pub const KR: f64 = 0.299;
pub const KG: f64 = 0.587;
pub const KB: f64 = 0.114;

/// Single-channel floating-point image plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    /// Wraps a row-major buffer. Fails if the length is wrong or any sample
    /// is NaN or infinite.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BadLength {
                expected: width * height,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Internal constructor for buffers already known to be well formed.
    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane::from_parts(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two planes of equal shape.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        self.check_same_dims(other)?;
        Ok(Plane::from_parts(
            self.width,
            self.height,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn check_same_dims(&self, other: &Plane) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sum of absolute forward differences along both axes.
    pub fn total_variation(&self) -> f64 {
        let (w, h) = self.dims();
        let mut tv = 0.0;
        for y in 0..h {
            for x in 0..w {
                let v = self.get(x, y);
                if x + 1 < w {
                    tv += (self.get(x + 1, y) - v).abs();
                }
                if y + 1 < h {
                    tv += (self.get(x, y + 1) - v).abs();
                }
            }
        }
        tv
    }

    pub fn clamp01(&self) -> Plane {
        self.map(|v| v.clamp(0.0, 1.0))
    }
}

fn check_three(a: &Plane, b: &Plane, c: &Plane) -> Result<()> {
    a.check_same_dims(b)?;
    a.check_same_dims(c)
}

/// Three-plane RGB image, samples in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub r: Plane,
    pub g: Plane,
    pub b: Plane,
}

impl RgbImage {
    pub fn new(r: Plane, g: Plane, b: Plane) -> Result<Self> {
        check_three(&r, &g, &b)?;
        Ok(Self { r, g, b })
    }

    /// Gray image with the same plane in all three channels.
    pub fn from_gray(p: &Plane) -> Self {
        Self {
            r: p.clone(),
            g: p.clone(),
            b: p.clone(),
        }
    }

    pub fn width(&self) -> usize {
        self.r.width()
    }

    pub fn height(&self) -> usize {
        self.r.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.r.dims()
    }

    pub fn planes(&self) -> [&Plane; 3] {
        [&self.r, &self.g, &self.b]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RgbImage {
        RgbImage {
            r: self.r.map(&f),
            g: self.g.map(&f),
            b: self.b.map(&f),
        }
    }

    /// BT.601 luma.
    pub fn luma(&self) -> Plane {
        let data = self
            .r
            .data()
            .iter()
            .zip(self.g.data())
            .zip(self.b.data())
            .map(|((&r, &g), &b)| KR * r + KG * g + KB * b)
            .collect();
        Plane::from_parts(self.width(), self.height(), data)
    }
}

/// Hue (fraction of a turn, `[0, 1)`), saturation and value planes.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    pub h: Plane,
    pub s: Plane,
    pub v: Plane,
}

impl HsvImage {
    pub fn new(h: Plane, s: Plane, v: Plane) -> Result<Self> {
        check_three(&h, &s, &v)?;
        Ok(Self { h, s, v })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.v.dims()
    }
}

/// Full-range BT.601 YUV: `y` in `[0, 1]`, chroma in `[-0.5, 0.5]`.
#[derive(Debug, Clone, PartialEq)]
pub struct YuvImage {
    pub y: Plane,
    pub u: Plane,
    pub v: Plane,
}

impl YuvImage {
    pub fn new(y: Plane, u: Plane, v: Plane) -> Result<Self> {
        check_three(&y, &u, &v)?;
        Ok(Self { y, u, v })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.y.dims()
    }
}

/// Hexcone conversion of one pixel. Hue is 0 on the gray axis.
pub fn rgb_to_hsv_pixel(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    let v = max;
    if max <= 0.0 || chroma <= 0.0 {
        return (0.0, 0.0, v);
    }
    let s = chroma / max;
    let sector = if max == r {
        crate::math::rem_euclid((g - b) / chroma, 6.0)
    } else if max == g {
        (b - r) / chroma + 2.0
    } else {
        (r - g) / chroma + 4.0
    };
    let mut h = sector / 6.0;
    if h >= 1.0 {
        h -= 1.0;
    }
    (h, s, v)
}

pub fn hsv_to_rgb_pixel(h: f64, s: f64, v: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        return (v, v, v);
    }
    let sector = crate::math::rem_euclid(h, 1.0) * 6.0;
    let i = crate::math::floor(sector);
    let f = sector - i;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match i as i64 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    }
}

pub fn rgb_to_yuv_pixel(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let y = KR * r + KG * g + KB * b;
    let u = (b - y) / (2.0 * (1.0 - KB));
    let v = (r - y) / (2.0 * (1.0 - KR));
    (y, u, v)
}

/// Inverse of [`rgb_to_yuv_pixel`] without clamping.
pub fn yuv_to_rgb_pixel(y: f64, u: f64, v: f64) -> (f64, f64, f64) {
    let r = y + 2.0 * (1.0 - KR) * v;
    let b = y + 2.0 * (1.0 - KB) * u;
    let g = (y - KR * r - KB * b) / KG;
    (r, g, b)
}

fn convert3(
    a: &Plane,
    b: &Plane,
    c: &Plane,
    f: impl Fn(f64, f64, f64) -> (f64, f64, f64),
) -> [Plane; 3] {
    let n = a.len();
    let (mut oa, mut ob, mut oc) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for ((&x, &y), &z) in a.data().iter().zip(b.data()).zip(c.data()) {
        let (p, q, r) = f(x, y, z);
        oa.push(p);
        ob.push(q);
        oc.push(r);
    }
    let (w, h) = a.dims();
    [
        Plane::from_parts(w, h, oa),
        Plane::from_parts(w, h, ob),
        Plane::from_parts(w, h, oc),
    ]
}

pub fn rgb_to_hsv(img: &RgbImage) -> HsvImage {
    let [h, s, v] = convert3(&img.r, &img.g, &img.b, rgb_to_hsv_pixel);
    HsvImage { h, s, v }
}

pub fn hsv_to_rgb(img: &HsvImage) -> RgbImage {
    let [r, g, b] = convert3(&img.h, &img.s, &img.v, hsv_to_rgb_pixel);
    RgbImage { r, g, b }
}

pub fn rgb_to_yuv(img: &RgbImage) -> YuvImage {
    let [y, u, v] = convert3(&img.r, &img.g, &img.b, rgb_to_yuv_pixel);
    YuvImage { y, u, v }
}

/// Inverse of [`rgb_to_yuv`]; results are clamped to `[0, 1]`.
pub fn yuv_to_rgb(img: &YuvImage) -> RgbImage {
    let [r, g, b] = convert3(&img.y, &img.u, &img.v, |y, u, v| {
        let (r, g, b) = yuv_to_rgb_pixel(y, u, v);
        (r.clamp(0.0, 1.0), g.clamp(0.0, 1.0), b.clamp(0.0, 1.0))
    });
    RgbImage { r, g, b }
}
