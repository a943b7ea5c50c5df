#![allow(dead_code)]

use std::path::Path;

use lowlight::io::save_image;
use lowlight_core::{synthetic, Plane, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_plane(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Plane {
    Plane::new(w, h, (0..w * h).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

pub fn random_rgb(w: usize, h: usize, rng: &mut ChaCha8Rng) -> RgbImage {
    RgbImage::new(random_plane(w, h, rng), random_plane(w, h, rng), random_plane(w, h, rng)).unwrap()
}

pub fn add_noise(p: &Plane, sigma: f64, seed: u64) -> Plane {
    let mut rng = rng(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    let data = p.data().iter().map(|v| (v + normal.sample(&mut rng)).clamp(0.0, 1.0)).collect();
    Plane::new(p.width(), p.height(), data).unwrap()
}

pub fn add_noise_rgb(img: &RgbImage, sigma: f64, seed: u64) -> RgbImage {
    RgbImage::new(
        add_noise(&img.r, sigma, seed),
        add_noise(&img.g, sigma, seed.wrapping_add(1)),
        add_noise(&img.b, sigma, seed.wrapping_add(2)),
    )
    .unwrap()
}

/// Small dark, noisy PNG corpus for end-to-end runs.
pub fn write_corpus(dir: &Path, count: usize) -> Vec<std::path::PathBuf> {
    (0..count)
        .map(|i| {
            let truth = if i % 2 == 0 {
                synthetic::lit_room(40 + 8 * i, 36)
            } else {
                synthetic::color_scene(36, 40 + 8 * i)
            };
            let dark = add_noise_rgb(&truth.map(|v| v * 0.3), 12.0 / 255.0, i as u64);
            let path = dir.join(format!("img{i}.png"));
            save_image(&dark, &path).unwrap();
            path
        })
        .collect()
}
