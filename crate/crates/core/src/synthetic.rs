//! Deterministic synthetic scenes for experiments and tests.
//!
//! Nothing here is random; noise is added by callers with a seeded
//! generator of their choice.

use core::f64::consts::PI;

use crate::image::{Plane, RgbImage};
use crate::math::{cos, sin};

/// Horizontal linear ramp from 0 at the left edge to 1 at the right edge.
pub fn ramp(width: usize, height: usize) -> Plane {
    let denom = (width.max(2) - 1) as f64;
    Plane::from_fn(width, height, |x, _| x as f64 / denom)
}

/// Left half `lo`, right half `hi`.
pub fn step(width: usize, height: usize, lo: f64, hi: f64) -> Plane {
    Plane::from_fn(width, height, |x, _| if x < width / 2 { lo } else { hi })
}

/// Alternating 0/1 cells of `cell` pixels.
pub fn checkerboard(width: usize, height: usize, cell: usize) -> Plane {
    let cell = cell.max(1);
    Plane::from_fn(width, height, |x, y| ((x / cell + y / cell) % 2) as f64)
}

/// Piecewise-smooth gray scene in `[0.1, 0.9]`: a lit gradient with a
/// rectangle, a disc and a band of soft stripes.
pub fn scene(width: usize, height: usize) -> Plane {
    let (w, h) = (width as f64, height as f64);
    Plane::from_fn(width, height, |x, y| {
        let (u, v) = (x as f64 / w, y as f64 / h);
        let mut value = 0.3 + 0.35 * u + 0.1 * v;
        if (0.15..0.45).contains(&u) && (0.2..0.55).contains(&v) {
            value = 0.8;
        }
        let (du, dv) = (u - 0.68, v - 0.62);
        if du * du + dv * dv < 0.04 {
            value = 0.2;
        }
        if v > 0.75 {
            value += 0.12 * sin(2.0 * PI * u * 6.0);
        }
        value.clamp(0.1, 0.9)
    })
}

/// Gray test pattern for denoising experiments, values in `[0.15, 0.85]`.
pub fn test_pattern(width: usize, height: usize) -> Plane {
    let (w, h) = (width as f64, height as f64);
    Plane::from_fn(width, height, |x, y| {
        let (u, v) = (x as f64 / w, y as f64 / h);
        let mut value = 0.25 + 0.3 * u;
        if (0.1..0.4).contains(&u) && (0.1..0.4).contains(&v) {
            value = 0.8;
        }
        let (du, dv) = (u - 0.7, v - 0.3);
        if du * du + dv * dv < 0.03 {
            value = 0.15;
        }
        if v > 0.55 {
            value = 0.5 + 0.25 * cos(2.0 * PI * (3.0 * u + 2.0 * v));
        }
        value.clamp(0.15, 0.85)
    })
}

/// Colored scene built from [`scene`] with spatially varying hue.
pub fn color_scene(width: usize, height: usize) -> RgbImage {
    let base = scene(width, height);
    let (w, h) = (width as f64, height as f64);
    let tint = |x: usize, y: usize, phase: f64| {
        let (u, v) = (x as f64 / w, y as f64 / h);
        0.8 + 0.2 * cos(2.0 * PI * (u + 0.5 * v) + phase)
    };
    let r = Plane::from_fn(width, height, |x, y| base.get(x, y) * tint(x, y, 0.0));
    let g = Plane::from_fn(width, height, |x, y| base.get(x, y) * tint(x, y, 2.1));
    let b = Plane::from_fn(width, height, |x, y| base.get(x, y) * tint(x, y, 4.2));
    RgbImage { r, g, b }
}

/// Predominantly bright color scene (most of the brightness mass above 0.6)
/// with a small dark corner.
pub fn bright_scene(width: usize, height: usize) -> RgbImage {
    let base = scene(width, height).map(|v| 0.55 + 0.45 * v);
    let (w, h) = (width as f64, height as f64);
    let dim = |x: usize, y: usize| {
        let (u, v) = (x as f64 / w, y as f64 / h);
        if u < 0.25 && v < 0.25 {
            0.08
        } else {
            1.0
        }
    };
    let r = Plane::from_fn(width, height, |x, y| base.get(x, y) * dim(x, y));
    let g = Plane::from_fn(width, height, |x, y| 0.95 * base.get(x, y) * dim(x, y));
    let b = Plane::from_fn(width, height, |x, y| 0.9 * base.get(x, y) * dim(x, y));
    RgbImage { r, g, b }
}

/// Unevenly lit color scene: a dim room whose light falls off away from
/// the right wall, with a bright window in the upper right. Mean luma is
/// about 0.25, with highlights near 1.
pub fn lit_room(width: usize, height: usize) -> RgbImage {
    let base = color_scene(width, height);
    let (w, h) = (width as f64, height as f64);
    let light = Plane::from_fn(width, height, |x, y| {
        let (u, v) = (x as f64 / w, y as f64 / h);
        if u > 0.6 && v < 0.4 {
            1.0
        } else {
            0.25 + 0.5 * u * (1.0 - v)
        }
    });
    let lit = |p: &Plane| {
        p.zip_map(&light, |a, l| (1.3 * a * l).min(1.0))
            .expect("planes share dimensions")
    };
    RgbImage {
        r: lit(&base.r),
        g: lit(&base.g),
        b: lit(&base.b),
    }
}
