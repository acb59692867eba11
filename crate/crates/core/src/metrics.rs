//! Image fidelity metrics: SSIM and PSNR against a ground-truth image.

use crate::error::{Error, Result};
use crate::image::GrayImage;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);
const GAUSSIAN_SIDE: usize = 11;
const GAUSSIAN_SIGMA: f64 = 1.5;
const FALLBACK_SIDE: usize = 3;

/// Per-pixel structural similarity over valid window positions, plus the
/// mean over that map.
#[derive(Clone, Debug, PartialEq)]
pub struct SsimResult {
    width: usize,
    height: usize,
    map: Vec<f64>,
    mean: f64,
    fallback_window: bool,
}

impl SsimResult {
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// True when the images were too small for the 11x11 Gaussian window
    /// and a 3x3 uniform window was used instead.
    pub fn used_fallback_window(&self) -> bool {
        self.fallback_window
    }

    /// Dimensions of the valid-window map (input size minus window size
    /// plus one on each axis).
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn map(&self) -> &[f64] {
        &self.map
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.width && y < self.height);
        self.map[y * self.width + x]
    }

    /// Renders the map as a grayscale image: 1 maps to 255, values at or
    /// below 0 to 0, linearly in between (half-up rounding).
    pub fn map_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| {
            let v = self.get(x, y).clamp(0.0, 1.0);
            (v * 255.0 + 0.5).floor() as u8
        })
        .expect("map is non-empty by construction")
    }
}

fn gaussian_window() -> Vec<f64> {
    let half = (GAUSSIAN_SIDE / 2) as isize;
    let mut w = Vec::with_capacity(GAUSSIAN_SIDE * GAUSSIAN_SIDE);
    for dy in -half..=half {
        for dx in -half..=half {
            let r2 = (dx * dx + dy * dy) as f64;
            w.push((-r2 / (2.0 * GAUSSIAN_SIGMA * GAUSSIAN_SIGMA)).exp());
        }
    }
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    w
}

fn uniform_window() -> Vec<f64> {
    vec![1.0 / (FALLBACK_SIDE * FALLBACK_SIDE) as f64; FALLBACK_SIDE * FALLBACK_SIDE]
}

fn check_dimensions(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    Ok(())
}

/// Structural similarity with an 11x11 Gaussian window (sigma 1.5,
/// C1 = (0.01 L)^2, C2 = (0.03 L)^2, L = 255).
///
/// The map covers valid window centers only; no padding is invented at the
/// borders, and the mean is taken over the map. Images smaller than the
/// Gaussian window fall back to a 3x3 uniform window, flagged on the
/// result. Images smaller than that are rejected.
pub fn ssim(a: &GrayImage, b: &GrayImage) -> Result<SsimResult> {
    check_dimensions(a, b)?;
    let (w, h) = (a.width(), a.height());
    let fallback = w < GAUSSIAN_SIDE || h < GAUSSIAN_SIDE;
    let (side, window) = if fallback {
        (FALLBACK_SIDE, uniform_window())
    } else {
        (GAUSSIAN_SIDE, gaussian_window())
    };
    if w < side || h < side {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
        });
    }
    let out_w = w - side + 1;
    let out_h = h - side + 1;
    let mut map = Vec::with_capacity(out_w * out_h);
    for y in 0..out_h {
        for x in 0..out_w {
            let mut mu_a = 0.0;
            let mut mu_b = 0.0;
            let mut aa = 0.0;
            let mut bb = 0.0;
            let mut ab = 0.0;
            for dy in 0..side {
                for dx in 0..side {
                    let weight = window[dy * side + dx];
                    let va = f64::from(a.get(x + dx, y + dy));
                    let vb = f64::from(b.get(x + dx, y + dy));
                    // Second moments associate as weight * (x * y) so that
                    // both exact promises hold bitwise: swapping the images
                    // only commutes va * vb, and on identical images the
                    // cross term equals the squared terms.
                    mu_a += weight * va;
                    mu_b += weight * vb;
                    aa += weight * (va * va);
                    bb += weight * (vb * vb);
                    ab += weight * (va * vb);
                }
            }
            let var_a = aa - mu_a * mu_a;
            let var_b = bb - mu_b * mu_b;
            let cov = ab - mu_a * mu_b;
            // Parenthesized so swapping the images gives bit-identical
            // rounding: symmetry is promised exactly, not approximately.
            let value = ((2.0 * (mu_a * mu_b) + C1) * (2.0 * cov + C2))
                / ((mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2));
            map.push(value);
        }
    }
    let mean = map.iter().sum::<f64>() / map.len() as f64;
    Ok(SsimResult {
        width: out_w,
        height: out_h,
        map,
        mean,
        fallback_window: fallback,
    })
}

/// Peak signal-to-noise ratio in decibels, or [`Psnr::Infinite`] when the
/// images are identical.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Psnr {
    Infinite,
    Decibels(f64),
}

impl Psnr {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Psnr::Infinite)
    }

    pub fn db(&self) -> Option<f64> {
        match self {
            Psnr::Infinite => None,
            Psnr::Decibels(db) => Some(*db),
        }
    }

    /// True when the ratio clears `threshold` dB (an infinite ratio clears
    /// every threshold).
    pub fn exceeds(&self, threshold: f64) -> bool {
        match self {
            Psnr::Infinite => true,
            Psnr::Decibels(db) => *db > threshold,
        }
    }
}

impl std::fmt::Display for Psnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Psnr::Infinite => f.write_str("inf"),
            Psnr::Decibels(db) => write!(f, "{db}"),
        }
    }
}

impl Serialize for Psnr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Psnr::Infinite => serializer.serialize_str("inf"),
            Psnr::Decibels(db) => serializer.serialize_f64(*db),
        }
    }
}

struct PsnrVisitor;

impl Visitor<'_> for PsnrVisitor {
    type Value = Psnr;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a number of decibels or the string \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Psnr, E> {
        Ok(Psnr::Decibels(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Psnr, E> {
        Ok(Psnr::Decibels(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Psnr, E> {
        Ok(Psnr::Decibels(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Psnr, E> {
        if v == "inf" {
            Ok(Psnr::Infinite)
        } else {
            Err(E::invalid_value(de::Unexpected::Str(v), &self))
        }
    }
}

impl<'de> Deserialize<'de> for Psnr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Psnr, D::Error> {
        deserializer.deserialize_any(PsnrVisitor)
    }
}

/// `10 log10(255^2 / MSE)` between two equal-sized images.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<Psnr> {
    check_dimensions(a, b)?;
    let mut sum = 0u64;
    for (&pa, &pb) in a.pixels().iter().zip(b.pixels()) {
        let diff = i64::from(pa) - i64::from(pb);
        sum += (diff * diff) as u64;
    }
    if sum == 0 {
        return Ok(Psnr::Infinite);
    }
    let mse = sum as f64 / (a.width() * a.height()) as f64;
    Ok(Psnr::Decibels(10.0 * (255.0 * 255.0 / mse).log10()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn checker(w: usize, h: usize) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| if (x + y) % 2 == 0 { 200 } else { 40 }).unwrap()
    }

    fn gradient(w: usize, h: usize) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| ((x * 255 / w + y * 128 / h) % 256) as u8).unwrap()
    }

    #[test]
    fn identical_images_have_unit_ssim() {
        let img = gradient(32, 24);
        let r = ssim(&img, &img).unwrap();
        assert_eq!(r.mean(), 1.0);
        assert!(r.map().iter().all(|&v| v == 1.0));
        assert!(!r.used_fallback_window());
        assert_eq!(r.dimensions(), (32 - 10, 24 - 10));
    }

    #[test]
    fn inverted_image_scores_negative() {
        let img = checker(32, 32);
        let inv = GrayImage::from_fn(32, 32, |x, y| 255 - img.get(x, y)).unwrap();
        let r = ssim(&img, &inv).unwrap();
        assert!(r.mean() < 0.0, "mean {}", r.mean());
    }

    #[test]
    fn ssim_is_symmetric_and_bounded() {
        let a = gradient(20, 20);
        let b = checker(20, 20);
        let ab = ssim(&a, &b).unwrap();
        let ba = ssim(&b, &a).unwrap();
        assert_eq!(ab.mean(), ba.mean());
        assert_eq!(ab.map(), ba.map());
        assert!(ab.map().iter().all(|&v| (-1.0..=1.0).contains(&v)));
    }

    #[test]
    fn one_pixel_shift_is_not_self_similar() {
        let img = gradient(24, 24);
        let shifted = GrayImage::from_fn(24, 24, |x, y| img.get((x + 1) % 24, y)).unwrap();
        assert!(ssim(&img, &shifted).unwrap().mean() < 1.0);
    }

    #[test]
    fn small_images_use_the_fallback_window() {
        let a = checker(8, 8);
        let b = gradient(8, 8);
        let r = ssim(&a, &b).unwrap();
        assert!(r.used_fallback_window());
        assert_eq!(r.dimensions(), (6, 6));
        let identical = ssim(&a, &a).unwrap();
        assert_eq!(identical.mean(), 1.0);
    }

    #[test]
    fn tiny_or_mismatched_images_are_rejected() {
        let a = checker(2, 2);
        assert!(matches!(ssim(&a, &a), Err(Error::ImageTooSmall { .. })));
        let b = checker(8, 8);
        let c = checker(8, 9);
        assert!(matches!(ssim(&b, &c), Err(Error::DimensionMismatch(..))));
        assert!(matches!(psnr(&b, &c), Err(Error::DimensionMismatch(..))));
    }

    #[test]
    fn ssim_map_exports_to_grayscale() {
        let img = checker(16, 16);
        let r = ssim(&img, &img).unwrap();
        let map = r.map_image();
        assert_eq!((map.width(), map.height()), r.dimensions());
        assert!(map.pixels().iter().all(|&p| p == 255));
    }

    #[test]
    fn psnr_of_identical_images_is_infinite() {
        let img = gradient(16, 16);
        let p = psnr(&img, &img).unwrap();
        assert!(p.is_infinite());
        assert_eq!(p.db(), None);
        assert!(p.exceeds(1e9));
        assert_eq!(p.to_string(), "inf");
    }

    #[test]
    fn unit_mse_pins_the_decibel_scale() {
        let a = GrayImage::constant(16, 16, 100).unwrap();
        let b = GrayImage::constant(16, 16, 101).unwrap();
        let p = psnr(&a, &b).unwrap();
        let db = p.db().unwrap();
        assert!((db - 48.1308036086791).abs() < 1e-9, "db {db}");
    }

    #[test]
    fn psnr_decreases_with_mse() {
        let base = GrayImage::constant(16, 16, 100).unwrap();
        let mut last = f64::INFINITY;
        for delta in [1u8, 2, 5, 20, 100] {
            let other = GrayImage::constant(16, 16, 100 + delta).unwrap();
            let db = psnr(&base, &other).unwrap().db().unwrap();
            assert!(db < last, "delta {delta}");
            last = db;
        }
    }

    #[test]
    fn psnr_is_symmetric() {
        let a = gradient(16, 16);
        let b = checker(16, 16);
        assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
    }

    #[test]
    fn psnr_serializes_inf_as_string() {
        assert_eq!(serde_json::to_string(&Psnr::Infinite).unwrap(), "\"inf\"");
        let round: Psnr = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(round, Psnr::Infinite);
        let db: Psnr = serde_json::from_str("30.5").unwrap();
        assert_eq!(db, Psnr::Decibels(30.5));
    }
}
