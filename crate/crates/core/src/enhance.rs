//! Shadow-up tone curve for the illumination layer.
//!
//! Below an adaptive threshold `I_th` the curve follows adaptive gamma
//! correction with a weighted distribution (AGCWD); at and above it the curve
//! is the identity, so bright regions pass through unchanged. All levels are
//! on the `[0, 255]` scale.

use crate::error::{Error, Result};
use crate::image::Plane;
use crate::math::{ceil, floor, powf, round};

pub const LEVELS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhanceParams {
    /// Percentile in `(0, 100)` that bounds the set averaged for `I_th`.
    pub percentile: f64,
    /// Weighting-distribution exponent in `[0, 1]`.
    pub alpha: f64,
}

impl Default for EnhanceParams {
    fn default() -> Self {
        Self {
            percentile: 75.0,
            alpha: 0.5,
        }
    }
}

impl EnhanceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.percentile > 0.0 && self.percentile < 100.0) {
            return Err(Error::InvalidParameter("percentile must be in (0, 100)"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter("alpha must be in [0, 1]"));
        }
        Ok(())
    }
}

/// 256-entry monotone transfer function with its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingCurve {
    lut: [f64; LEVELS],
    threshold: f64,
    degenerate: bool,
}

impl MappingCurve {
    pub fn identity() -> Self {
        let mut lut = [0.0; LEVELS];
        for (l, v) in lut.iter_mut().enumerate() {
            *v = l as f64;
        }
        Self {
            lut,
            threshold: 0.0,
            degenerate: false,
        }
    }

    /// Wraps an arbitrary table. Entries are clamped to `[0, 255]` and made
    /// non-decreasing.
    pub fn from_lut(mut lut: [f64; LEVELS], threshold: f64) -> Self {
        enforce_monotone(&mut lut);
        Self {
            lut,
            threshold,
            degenerate: false,
        }
    }

    pub fn lut(&self) -> &[f64; LEVELS] {
        &self.lut
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// True when the curve is the identity fallback for a degenerate histogram.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Linear interpolation of the table at a real-valued level in `[0, 255]`.
    pub fn eval(&self, level: f64) -> f64 {
        let level = level.clamp(0.0, 255.0);
        let k = (floor(level) as usize).min(LEVELS - 2);
        let t = level - k as f64;
        if t == 0.0 {
            return self.lut[k];
        }
        self.lut[k] * (1.0 - t) + self.lut[k + 1] * t
    }
}

fn enforce_monotone(lut: &mut [f64; LEVELS]) {
    let mut running = 0.0f64;
    for v in lut.iter_mut() {
        running = running.max(v.clamp(0.0, 255.0));
        *v = running;
    }
}

/// Adaptive threshold `I_th = 255 - mean{ I : P < I < I_max }` where `P` is
/// the nearest-rank percentile of the illumination on the `[0, 255]` scale.
pub fn compute_threshold(i: &Plane, percentile: f64) -> Result<f64> {
    if !(percentile > 0.0 && percentile < 100.0) {
        return Err(Error::InvalidParameter("percentile must be in (0, 100)"));
    }
    if i.is_empty() {
        return Err(Error::DegenerateHistogram);
    }
    let scaled: alloc::vec::Vec<f64> = i.data().iter().map(|v| v * 255.0).collect();
    let mut sorted = scaled.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let rank = (ceil(percentile / 100.0 * n as f64) as usize).clamp(1, n);
    let p = sorted[rank - 1];
    let max = sorted[n - 1];

    let (mut sum, mut count) = (0.0, 0usize);
    for &v in &scaled {
        if p < v && v < max {
            sum += v;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::DegenerateHistogram);
    }
    Ok(255.0 - sum / count as f64)
}

/// Full-range AGCWD table built from the 256-bin histogram of `round(I * 255)`.
///
/// A perfectly flat histogram gives every level the same weight. A plane
/// occupying a single bin has no usable distribution and is rejected.
pub fn build_agcwd_curve(i: &Plane, alpha: f64) -> Result<[f64; LEVELS]> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter("alpha must be in [0, 1]"));
    }
    let mut hist = [0usize; LEVELS];
    for &v in i.data() {
        hist[round(v.clamp(0.0, 1.0) * 255.0) as usize] += 1;
    }
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::DegenerateHistogram);
    }
    let n = i.len() as f64;
    let mut pdf = [0.0; LEVELS];
    for (p, &c) in pdf.iter_mut().zip(&hist) {
        *p = c as f64 / n;
    }
    let pdf_max = pdf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pdf_min = pdf.iter().copied().fold(f64::INFINITY, f64::min);
    let range = pdf_max - pdf_min;

    let mut weighted = [0.0; LEVELS];
    for (w, &p) in weighted.iter_mut().zip(&pdf) {
        let ratio = if range > 0.0 { (p - pdf_min) / range } else { 1.0 };
        *w = pdf_max * powf(ratio, alpha);
    }
    let total: f64 = weighted.iter().sum();

    let mut lut = [0.0; LEVELS];
    let mut cumulative = 0.0;
    for (l, (out, &w)) in lut.iter_mut().zip(&weighted).enumerate() {
        cumulative += w;
        let cdf = cumulative / total;
        *out = if l == 0 {
            0.0
        } else {
            255.0 * powf(l as f64 / 255.0, 1.0 - cdf)
        };
    }
    Ok(lut)
}

/// AGCWD below `I_th`, identity at and above it.
///
/// The AGCWD segment is scaled by `I_th / agcwd[floor(I_th)]` so it meets the
/// identity line at the threshold, and never drops below the identity.
/// Degenerate histograms produce the identity curve with threshold 0.
pub fn build_mapping_curve(i: &Plane, params: &EnhanceParams) -> Result<MappingCurve> {
    params.validate()?;
    let (threshold, agcwd) = match compute_threshold(i, params.percentile)
        .and_then(|t| Ok((t, build_agcwd_curve(i, params.alpha)?)))
    {
        Ok(v) => v,
        Err(Error::DegenerateHistogram) => {
            return Ok(MappingCurve {
                degenerate: true,
                ..MappingCurve::identity()
            })
        }
        Err(e) => return Err(e),
    };

    let knee = (floor(threshold) as usize).min(LEVELS - 1);
    let scale = if agcwd[knee] > 0.0 {
        threshold / agcwd[knee]
    } else {
        1.0
    };
    let mut lut = [0.0; LEVELS];
    for (l, out) in lut.iter_mut().enumerate() {
        let level = l as f64;
        *out = if level < threshold {
            (agcwd[l] * scale).max(level)
        } else {
            level
        };
    }
    enforce_monotone(&mut lut);
    Ok(MappingCurve {
        lut,
        threshold,
        degenerate: false,
    })
}

/// Maps every sample through the curve: `T(I * 255) / 255`.
pub fn apply_curve(i: &Plane, curve: &MappingCurve) -> Plane {
    i.map(|v| (curve.eval(v * 255.0) / 255.0).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn plane_from_levels(levels: &[f64]) -> Plane {
        Plane::new(levels.len(), 1, levels.iter().map(|l| l / 255.0).collect()).unwrap()
    }

    /// Pixel-by-pixel reading of the threshold definition.
    fn threshold_oracle(values: &[f64], percentile: f64) -> Option<f64> {
        let n = values.len();
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut rank = 1;
        while (rank as f64) < percentile / 100.0 * n as f64 {
            rank += 1;
        }
        let p = sorted[rank - 1];
        let max = sorted[n - 1];
        let mut sum = 0.0;
        let mut count = 0;
        for &v in values {
            if v > p && v < max {
                sum += v;
                count += 1;
            }
        }
        (count > 0).then(|| 255.0 - sum / count as f64)
    }

    #[test]
    fn threshold_on_constant_is_degenerate() {
        assert_eq!(
            compute_threshold(&Plane::filled(5, 5, 0.4), 75.0),
            Err(Error::DegenerateHistogram)
        );
    }

    #[test]
    fn threshold_hundred_levels() {
        // Values 0..99 scaled to [0, 255]. Nearest rank 75 -> P = 74 * 255/99;
        // strictly between P and the max: 75..=98, mean 86.5 * 255/99.
        let values: Vec<f64> = (0..100).map(|k| k as f64 * 255.0 / 99.0).collect();
        let plane = Plane::new(10, 10, values.iter().map(|v| v / 255.0).collect()).unwrap();
        let got = compute_threshold(&plane, 75.0).unwrap();
        let oracle = threshold_oracle(&plane.data().iter().map(|v| v * 255.0).collect::<Vec<_>>(), 75.0).unwrap();
        assert_eq!(got, oracle);
        assert!((got - (255.0 - 86.5 * 255.0 / 99.0)).abs() < 1e-9);
    }

    #[test]
    fn brighter_image_has_smaller_threshold() {
        let dark = crate::synthetic::scene(32, 32).map(|v| v * 0.4);
        let bright = dark.map(|v| (v * 2.0).min(1.0));
        assert!(compute_threshold(&bright, 75.0).unwrap() < compute_threshold(&dark, 75.0).unwrap());
    }

    #[test]
    fn agcwd_endpoints() {
        let lut = build_agcwd_curve(&crate::synthetic::scene(16, 16), 0.5).unwrap();
        assert_eq!(lut[0], 0.0);
        assert_eq!(lut[255], 255.0);
        assert_eq!(
            build_agcwd_curve(&Plane::filled(4, 4, 0.3), 0.5),
            Err(Error::DegenerateHistogram)
        );
    }

    #[test]
    fn agcwd_uniform_histogram() {
        // Every level occupied once: cdf_w(l) = (l + 1) / 256 for any alpha.
        let levels: Vec<f64> = (0..256).map(|l| l as f64).collect();
        let lut = build_agcwd_curve(&plane_from_levels(&levels), 1.0).unwrap();
        for (l, &got) in lut.iter().enumerate().skip(1) {
            let cdf = (l as f64 + 1.0) / 256.0;
            let expected = 255.0 * (l as f64 / 255.0).powf(1.0 - cdf);
            assert!((got - expected).abs() < 1e-9, "level {l}");
        }
        // Frozen scalar evaluations of the same three formulas.
        assert!((lut[1] - 1.044_241_851_802_717_2).abs() < 1e-9);
        assert!((lut[64] - 90.910_737_860_781_51).abs() < 1e-9);
        assert!((lut[128] - 181.152_500_739_168_54).abs() < 1e-9);
    }

    #[test]
    fn agcwd_alpha_one_matches_scalar_formulas() {
        let levels = [10.0, 10.0, 10.0, 40.0, 40.0, 200.0];
        let lut = build_agcwd_curve(&plane_from_levels(&levels), 1.0).unwrap();
        // pdf: 10 -> 1/2, 40 -> 1/3, 200 -> 1/6, others 0; pdf_min = 0, so
        // pdf_w = pdf (alpha = 1) and cdf_w is the plain cumulative histogram.
        let cdf = |l: usize| match l {
            0..=9 => 0.0,
            10..=39 => 0.5,
            40..=199 => 5.0 / 6.0,
            _ => 1.0,
        };
        for (l, &got) in lut.iter().enumerate().skip(1) {
            let expected = 255.0 * (l as f64 / 255.0).powf(1.0 - cdf(l));
            assert!((got - expected).abs() < 1e-9, "level {l}");
        }
    }

    #[test]
    fn identity_above_threshold() {
        let dark = crate::synthetic::scene(48, 48).map(|v| v * 0.5);
        let curve = build_mapping_curve(&dark, &EnhanceParams::default()).unwrap();
        let th = curve.threshold();
        assert!(th > 0.0 && th < 255.0);
        let first = ceil(th) as usize;
        for l in first..256 {
            assert_eq!(curve.lut()[l], l as f64);
        }
        for l in 0..first {
            assert!(curve.lut()[l] >= l as f64);
        }
        let knee = floor(th) as usize;
        assert!((curve.lut()[knee] - th).abs() <= 1.0);
        // The "otherwise" branch applies at exactly I_th.
        if th == floor(th) {
            assert_eq!(curve.lut()[knee], th);
        }
    }

    #[test]
    fn degenerate_falls_back_to_identity() {
        let curve = build_mapping_curve(&Plane::filled(8, 8, 0.2), &EnhanceParams::default()).unwrap();
        assert!(curve.is_degenerate());
        assert_eq!(curve.threshold(), 0.0);
        assert_eq!(curve.lut(), MappingCurve::identity().lut());
    }

    #[test]
    fn invalid_params() {
        let p = crate::synthetic::scene(8, 8);
        for bad in [
            EnhanceParams { percentile: 0.0, alpha: 0.5 },
            EnhanceParams { percentile: 100.0, alpha: 0.5 },
            EnhanceParams { percentile: 75.0, alpha: 1.5 },
        ] {
            assert!(matches!(build_mapping_curve(&p, &bad), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn apply_identity_and_constant_curves() {
        let p = crate::synthetic::scene(20, 20);
        let out = apply_curve(&p, &MappingCurve::identity());
        for (a, b) in out.data().iter().zip(p.data()) {
            assert!((a - b).abs() <= 1e-6);
        }
        let flat = MappingCurve::from_lut([128.0; LEVELS], 0.0);
        assert!(apply_curve(&p, &flat).data().iter().all(|&v| v == 128.0 / 255.0));
    }

    #[test]
    fn threshold_splits_exactly_at_level() {
        let curve = build_mapping_curve(&crate::synthetic::scene(32, 32).map(|v| v * 0.6), &EnhanceParams::default()).unwrap();
        // Level 250 is always on the identity branch (I_th < 255).
        assert_eq!(curve.lut()[250], 250.0);
    }

    proptest! {
        #[test]
        fn threshold_matches_oracle(values in proptest::collection::vec(0u8..=255, 256)) {
            let plane = Plane::new(16, 16, values.iter().map(|&v| v as f64 / 255.0).collect()).unwrap();
            let scaled: Vec<f64> = plane.data().iter().map(|v| v * 255.0).collect();
            match (compute_threshold(&plane, 75.0), threshold_oracle(&scaled, 75.0)) {
                (Ok(a), Some(b)) => prop_assert_eq!(a, b),
                (Err(Error::DegenerateHistogram), None) => {}
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
            }
        }

        #[test]
        fn apply_matches_scalar_loop(
            values in proptest::collection::vec(0.0f64..=1.0, 64),
            steps in proptest::collection::vec(0.0f64..2.0, LEVELS),
        ) {
            let mut lut = [0.0; LEVELS];
            let mut acc = 0.0;
            for (l, s) in lut.iter_mut().zip(&steps) {
                acc = (acc + s).min(255.0);
                *l = acc;
            }
            let curve = MappingCurve::from_lut(lut, 0.0);
            let plane = Plane::new(8, 8, values.clone()).unwrap();
            let out = apply_curve(&plane, &curve);
            for (o, v) in out.data().iter().zip(&values) {
                let level = v * 255.0;
                let k = (level.floor() as usize).min(254);
                let t = level - k as f64;
                let expected = if t == 0.0 { lut[k] } else { lut[k] * (1.0 - t) + lut[k + 1] * t } / 255.0;
                prop_assert_eq!(*o, expected.clamp(0.0, 1.0));
            }
        }

        #[test]
        fn curve_is_monotone_and_order_preserving(values in proptest::collection::vec(0.0f64..=0.7, 144)) {
            let plane = Plane::new(12, 12, values).unwrap();
            let curve = build_mapping_curve(&plane, &EnhanceParams::default()).unwrap();
            for l in 0..LEVELS - 1 {
                prop_assert!(curve.lut()[l + 1] >= curve.lut()[l]);
            }
            prop_assert!(curve.lut()[255] <= 255.0);
            let out = apply_curve(&plane, &curve);
            let mut pairs: Vec<(f64, f64)> = plane.data().iter().copied().zip(out.data().iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for w in pairs.windows(2) {
                prop_assert!(w[1].1 >= w[0].1);
            }
        }
    }
}
