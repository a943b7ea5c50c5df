mod common;

use lowlight_core::denoise::{bm3d_hard, bm3d_wiener, denoise_luma, estimate_sigma};
use lowlight_core::metrics::psnr;
use lowlight_core::{synthetic, Bm3dParams, Plane, Sigma};

#[test]
fn sigma_estimate_on_pure_noise() {
    let noise = common::add_noise(&Plane::filled(256, 256, 0.0), 0.1, 11, false);
    let s = estimate_sigma(&noise).unwrap();
    assert!((0.085..=0.115).contains(&s), "estimate {s}");
}

#[test]
fn sigma_estimate_on_clean_gradient() {
    let p = Plane::from_fn(64, 64, |x, y| 0.2 + 0.6 * (x + y) as f64 / 126.0);
    assert!(estimate_sigma(&p).unwrap() <= 0.005);
}

#[test]
fn bm3d_gains() {
    let (clean, noisy) = common::bm3d_fixture();
    let params = Bm3dParams {
        sigma: Sigma::Fixed(25.0 / 255.0),
        ..Bm3dParams::default()
    };
    let base = psnr(&noisy, &clean).unwrap();
    let hard = bm3d_hard(&noisy, &params).unwrap();
    let wiener = bm3d_wiener(&noisy, &hard, &params).unwrap();
    let p_hard = psnr(&hard, &clean).unwrap();
    let p_wie = psnr(&wiener, &clean).unwrap();
    println!("noisy {base:.2} dB, hard {p_hard:.2} dB, wiener {p_wie:.2} dB");
    assert!(p_hard - base >= 3.0);
    assert!(p_wie >= p_hard);
    assert!(p_wie - base >= 4.0);
}

#[test]
fn auto_sigma_full_denoise() {
    let (clean, noisy) = common::bm3d_fixture();
    let out = denoise_luma(&noisy, &Bm3dParams::default()).unwrap();
    let gain = psnr(&out, &clean).unwrap() - psnr(&noisy, &clean).unwrap();
    println!("auto sigma {:.4}, gain {gain:.2} dB", estimate_sigma(&noisy).unwrap());
    assert!(gain >= 4.0);
    assert!((out.mean() - noisy.mean()).abs() <= 0.01);
    assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn clean_smooth_input_is_nearly_untouched() {
    let p = Plane::from_fn(48, 48, |x, y| 0.2 + 0.5 * x as f64 / 47.0 + 0.1 * y as f64 / 47.0);
    let out = denoise_luma(&p, &Bm3dParams::default()).unwrap();
    for (a, b) in out.data().iter().zip(p.data()) {
        assert!((a - b).abs() <= 0.01);
    }
}

#[test]
fn deterministic() {
    let (_, noisy) = common::bm3d_fixture();
    let a = denoise_luma(&noisy, &Bm3dParams::default()).unwrap();
    let b = denoise_luma(&noisy, &Bm3dParams::default()).unwrap();
    assert_eq!(a, b);
    let pattern = synthetic::test_pattern(32, 32);
    assert_eq!(
        denoise_luma(&pattern, &Bm3dParams { sigma: Sigma::Fixed(0.0), ..Bm3dParams::default() }).unwrap(),
        pattern
    );
}
