mod common;

use lowlight_core::metrics::{psnr, ssim};
use lowlight_core::{synthetic, Plane};

fn wave_a() -> Plane {
    Plane::from_fn(48, 40, |x, y| {
        let (x, y) = (x as f64, y as f64);
        0.5 + 0.4 * (0.3 * x).sin() * (0.2 * y).cos()
    })
}

#[test]
fn ssim_matches_reference_implementation() {
    // Reference values from scikit-image `structural_similarity` with
    // gaussian_weights=True, sigma=1.5, use_sample_covariance=False,
    // data_range=1.0 on the same formula-defined planes.
    let a = wave_a();
    let b = Plane::from_fn(48, 40, |x, y| {
        let (x, y) = (x as f64, y as f64);
        0.5 + 0.35 * (0.3 * x + 0.2).sin() * (0.21 * y).cos() + 0.05 * (1.7 * x + 2.3 * y).cos()
    });
    let c = Plane::from_fn(48, 40, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        (a.get(x, y) * 0.6 + 0.1 * (0.9 * xf * yf / 40.0).cos()).clamp(0.0, 1.0)
    });
    assert!((ssim(&a, &b).unwrap() - 0.867_237_339_715_101_1).abs() < 1e-4);
    assert!((ssim(&a, &c).unwrap() - 0.591_760_537_223_075_5).abs() < 1e-4);
}

#[test]
fn psnr_never_increases_with_more_noise() {
    let clean = synthetic::scene(48, 48);
    let mut last = f64::INFINITY;
    for k in 1..=6 {
        let noisy = common::add_noise(&clean, 0.02 * k as f64, 17, false);
        let p = psnr(&noisy, &clean).unwrap();
        assert!(p <= last);
        last = p;
    }
}
