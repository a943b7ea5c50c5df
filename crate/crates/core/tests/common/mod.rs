#![allow(dead_code)]

use lowlight_core::{Plane, RgbImage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adds N(0, sigma^2) noise; `clip` clamps the result to [0, 1].
pub fn add_noise(p: &Plane, sigma: f64, seed: u64, clip: bool) -> Plane {
    let mut rng = rng(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    let data = p
        .data()
        .iter()
        .map(|&v| {
            let n = v + normal.sample(&mut rng);
            if clip {
                n.clamp(0.0, 1.0)
            } else {
                n
            }
        })
        .collect();
    Plane::new(p.width(), p.height(), data).unwrap()
}

pub fn add_noise_rgb(img: &RgbImage, sigma: f64, seed: u64) -> RgbImage {
    RgbImage::new(
        add_noise(&img.r, sigma, seed, true),
        add_noise(&img.g, sigma, seed.wrapping_add(1), true),
        add_noise(&img.b, sigma, seed.wrapping_add(2), true),
    )
    .unwrap()
}

/// The fixed-seed BM3D fixture: 64x64 test pattern with sigma = 25/255.
pub fn bm3d_fixture() -> (Plane, Plane) {
    let clean = lowlight_core::synthetic::test_pattern(64, 64);
    let noisy = add_noise(&clean, 25.0 / 255.0, 7, true);
    (clean, noisy)
}
