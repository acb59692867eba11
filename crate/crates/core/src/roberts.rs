//! Roberts cross edge detection, exact and stochastic.
//!
//! The reference detector computes, for every 2x2 window of the normalized
//! image, half the sum of the two diagonal differences:
//! `G = 0.5 (|p(x,y) - p(x+1,y+1)| + |p(x+1,y) - p(x,y+1)|)`.
//!
//! The stochastic detector computes the same quantity in stream form. Each
//! diagonal becomes a positively correlated stream pair whose XOR encodes
//! the absolute difference, and a MUX with an independent half-rate select
//! at 0.5 averages the two difference streams. Every output pixel draws its
//! streams from substreams keyed by the pixel coordinates and a role name,
//! so the result is a pure function of (image, config) and does not depend
//! on scan order or parallel scheduling. A pixel that participates in
//! several windows is re-encoded per window, like separate physical
//! encoding passes; windows share no streams.

use crate::bitstream::{
    encode, encode_pair, inject_flips_pair, BitStream, CorrelationMode, FlipSpec,
};
use crate::device::{sne_sample_pair, SneTransfer};
use crate::entropy::EntropySource;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::logic::gate_mux;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Image pixels rescaled to probabilities in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ProbabilityMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.width && y < self.height);
        self.values[y * self.width + x]
    }
}

/// Divides each pixel by 255.
pub fn normalize(img: &GrayImage) -> ProbabilityMap {
    ProbabilityMap {
        width: img.width(),
        height: img.height(),
        values: img.pixels().iter().map(|&p| f64::from(p) / 255.0).collect(),
    }
}

/// Gradient magnitudes in `[0, 1]`, one per 2x2 input window, so one row
/// and one column smaller than the source image.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl GradientMap {
    fn new(width: usize, height: usize, values: Vec<f64>) -> GradientMap {
        debug_assert_eq!(values.len(), width * height);
        debug_assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        GradientMap {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.width && y < self.height);
        self.values[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mean absolute difference against another map of the same shape.
    pub fn mean_abs_diff(&self, other: &GradientMap) -> Result<f64> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(sum / self.values.len() as f64)
    }

    /// Row-major CSV rendering of the raw float values.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.values.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Where the detector's streams come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamSource {
    /// Comparator construction on an ideal uniform source.
    Analytic,
    /// The memristor encoder model's two-comparator sampler.
    Device,
}

impl std::str::FromStr for StreamSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "analytic" => Ok(StreamSource::Analytic),
            "device" => Ok(StreamSource::Device),
            other => Err(format!(
                "unknown stream source {other:?} (expected analytic or device)"
            )),
        }
    }
}

/// Stochastic detector settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Stream length per encoded value.
    pub bits: usize,
    /// Fault injection applied to the encoded diagonal pairs (never to the
    /// MUX select, which models a control line rather than a datum).
    pub flip: Option<FlipSpec>,
    /// Root seed; every pixel derives its own substreams from it.
    pub seed: u64,
    pub source: StreamSource,
}

impl DetectorConfig {
    pub fn new(bits: usize, seed: u64) -> DetectorConfig {
        DetectorConfig {
            bits,
            flip: None,
            seed,
            source: StreamSource::Analytic,
        }
    }
}

fn check_window_size(img: &GrayImage) -> Result<()> {
    if img.width() < 2 || img.height() < 2 {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(())
}

/// Exact Roberts cross on the normalized image; the ground truth the
/// stochastic detector is measured against.
pub fn reference_roberts(img: &GrayImage) -> Result<GradientMap> {
    check_window_size(img)?;
    let p = normalize(img);
    let (w, h) = (img.width() - 1, img.height() - 1);
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let gx = (p.get(x, y) - p.get(x + 1, y + 1)).abs();
            let gy = (p.get(x + 1, y) - p.get(x, y + 1)).abs();
            values.push(0.5 * (gx + gy));
        }
    }
    Ok(GradientMap::new(w, h, values))
}

fn diagonal_pair(
    pa: f64,
    pb: f64,
    cfg: &DetectorConfig,
    src: &EntropySource,
) -> Result<(BitStream, BitStream)> {
    match cfg.source {
        StreamSource::Analytic => encode_pair(pa, pb, cfg.bits, CorrelationMode::Positive, src),
        StreamSource::Device => {
            // The encoder's reference voltage is finite, so exact 0 and 1
            // are nudged just inside the open interval it can reach.
            let clamp = |p: f64| p.clamp(1e-9, 1.0 - 1e-9);
            sne_sample_pair(clamp(pa), clamp(pb), cfg.bits, &SneTransfer::default(), src)
        }
    }
}

fn pixel_gradient(
    p: &ProbabilityMap,
    x: usize,
    y: usize,
    cfg: &DetectorConfig,
    root: &EntropySource,
) -> Result<f64> {
    let px = root.substream(format!("px/{x}/{y}"));
    let (mut ax, mut bx) = diagonal_pair(
        p.get(x, y),
        p.get(x + 1, y + 1),
        cfg,
        &px.substream("pair_x"),
    )?;
    let (mut ay, mut by) = diagonal_pair(
        p.get(x + 1, y),
        p.get(x, y + 1),
        cfg,
        &px.substream("pair_y"),
    )?;
    if let Some(spec) = &cfg.flip {
        let flips = px.substream("flips");
        (ax, bx) = inject_flips_pair(&ax, &bx, spec, &flips.substream("x"))?;
        (ay, by) = inject_flips_pair(&ay, &by, spec, &flips.substream("y"))?;
    }
    let gx = ax.xor(&bx)?;
    let gy = ay.xor(&by)?;
    let select = encode(0.5, cfg.bits.div_ceil(2), &px.substream("select"))?;
    Ok(gate_mux(&gx, &gy, &select)?.value())
}

/// Stochastic Roberts cross seeded from `cfg.seed`.
pub fn stochastic_roberts(img: &GrayImage, cfg: &DetectorConfig) -> Result<GradientMap> {
    stochastic_roberts_with(img, cfg, &EntropySource::new(cfg.seed))
}

/// Stochastic Roberts cross drawing from a caller-supplied source (for
/// embedding in larger seeded pipelines); `cfg.seed` is ignored.
pub fn stochastic_roberts_with(
    img: &GrayImage,
    cfg: &DetectorConfig,
    src: &EntropySource,
) -> Result<GradientMap> {
    check_window_size(img)?;
    if cfg.bits == 0 {
        return Err(Error::EmptyStream);
    }
    let p = normalize(img);
    let (w, h) = (img.width() - 1, img.height() - 1);
    let rows: Vec<Vec<f64>> = (0..h)
        .into_par_iter()
        .map(|y| {
            (0..w)
                .map(|x| pixel_gradient(&p, x, y, cfg, src))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GradientMap::new(w, h, rows.concat()))
}

/// Quantizes gradients to 8-bit pixels: `round(255 g)`, halves up.
pub fn gradient_to_image(g: &GradientMap) -> GrayImage {
    GrayImage::from_fn(g.width(), g.height(), |x, y| {
        (g.get(x, y) * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
    })
    .expect("gradient maps are non-empty")
}

/// The conventional-arithmetic baseline under fault injection: each pixel's
/// 8-bit code has every bit flipped independently with probability `rate`
/// (so a high-order flip moves the value by up to 128 levels), then the
/// exact detector runs on the corrupted image.
pub fn binary_reference_with_flips(
    img: &GrayImage,
    rate: f64,
    src: &EntropySource,
) -> Result<GradientMap> {
    if !(0.0..=0.5).contains(&rate) || rate.is_nan() {
        return Err(Error::InvalidFlipRate(rate));
    }
    check_window_size(img)?;
    let mut rng = src.rng();
    let mut corrupted = Vec::with_capacity(img.pixels().len());
    for &pixel in img.pixels() {
        let mut mask = 0u8;
        for bit in 0..8 {
            if rand::Rng::random::<f64>(&mut rng) < rate {
                mask |= 1 << bit;
            }
        }
        corrupted.push(pixel ^ mask);
    }
    reference_roberts(&GrayImage::new(img.width(), img.height(), corrupted)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstream::FlipMode;

    fn cfg(bits: usize, seed: u64) -> DetectorConfig {
        DetectorConfig::new(bits, seed)
    }

    #[test]
    fn reference_matches_hand_computation() {
        // 3x3 with a bright corner: windows differ in which diagonals cross it.
        let img = GrayImage::new(3, 3, vec![255, 0, 0, 0, 0, 0, 0, 0, 255]).unwrap();
        let g = reference_roberts(&img).unwrap();
        assert_eq!((g.width(), g.height()), (2, 2));
        assert_eq!(g.get(0, 0), 0.5);
        assert_eq!(g.get(1, 0), 0.0);
        assert_eq!(g.get(0, 1), 0.0);
        assert_eq!(g.get(1, 1), 0.5);
    }

    #[test]
    fn reference_of_constant_image_is_zero() {
        let img = GrayImage::constant(5, 4, 77).unwrap();
        let g = reference_roberts(&img).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn undersized_images_are_rejected() {
        let img = GrayImage::constant(1, 5, 0).unwrap();
        assert!(matches!(
            reference_roberts(&img),
            Err(Error::ImageTooSmall { .. })
        ));
        assert!(matches!(
            stochastic_roberts(&img, &cfg(16, 1)),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn zero_bits_is_rejected() {
        let img = GrayImage::constant(3, 3, 0).unwrap();
        assert!(matches!(
            stochastic_roberts(&img, &cfg(0, 1)),
            Err(Error::EmptyStream)
        ));
    }

    #[test]
    fn stochastic_constant_image_is_exactly_zero() {
        // Equal probabilities give bit-identical pair streams, so the XOR
        // stage sees all-zero inputs regardless of stream length.
        let img = GrayImage::constant(6, 6, 130).unwrap();
        for source in [StreamSource::Analytic, StreamSource::Device] {
            let mut c = cfg(8, 3);
            c.source = source;
            let g = stochastic_roberts(&img, &c).unwrap();
            assert!(g.values().iter().all(|&v| v == 0.0), "{source:?}");
        }
    }

    #[test]
    fn single_edge_window_lands_near_half() {
        let img = GrayImage::new(2, 2, vec![255, 0, 0, 0]).unwrap();
        let g = stochastic_roberts(&img, &cfg(256, 7)).unwrap();
        assert_eq!((g.width(), g.height()), (1, 1));
        assert!((g.get(0, 0) - 0.5).abs() < 0.10, "g {}", g.get(0, 0));
    }

    #[test]
    fn detector_is_deterministic() {
        let img = GrayImage::from_fn(8, 8, |x, y| ((x * 40 + y * 23) % 256) as u8).unwrap();
        let a = stochastic_roberts(&img, &cfg(64, 11)).unwrap();
        let b = stochastic_roberts(&img, &cfg(64, 11)).unwrap();
        assert_eq!(a, b);
        let other_seed = stochastic_roberts(&img, &cfg(64, 12)).unwrap();
        assert_ne!(a, other_seed);
    }

    #[test]
    fn explicit_source_matches_seed_path() {
        let img = GrayImage::from_fn(6, 6, |x, y| ((x * 31 + y * 57) % 256) as u8).unwrap();
        let c = cfg(32, 9);
        let direct = stochastic_roberts(&img, &c).unwrap();
        let via_src = stochastic_roberts_with(&img, &c, &EntropySource::new(9)).unwrap();
        assert_eq!(direct, via_src);
    }

    #[test]
    fn output_stays_in_range_with_flips() {
        let img = GrayImage::from_fn(7, 5, |x, y| ((x * 91 + y * 17) % 256) as u8).unwrap();
        let mut c = cfg(32, 4);
        for mode in [
            FlipMode::IndependentPerBit,
            FlipMode::SharedMaskPerPair,
            FlipMode::ExactCount,
        ] {
            c.flip = Some(FlipSpec::new(mode, 0.4).unwrap());
            let g = stochastic_roberts(&img, &c).unwrap();
            assert_eq!((g.width(), g.height()), (6, 4));
            assert!(g.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn shared_mask_flips_leave_gradients_bit_identical() {
        let img = GrayImage::from_fn(9, 9, |x, y| ((x * 29 + y * 41) % 256) as u8).unwrap();
        let clean = stochastic_roberts(&img, &cfg(64, 5)).unwrap();
        for rate in [0.1, 0.3, 0.5] {
            let mut c = cfg(64, 5);
            c.flip = Some(FlipSpec::new(FlipMode::SharedMaskPerPair, rate).unwrap());
            let flipped = stochastic_roberts(&img, &c).unwrap();
            assert_eq!(flipped, clean, "rate {rate}");
        }
    }

    #[test]
    fn gradient_image_rounds_half_up() {
        let g = GradientMap::new(4, 1, vec![0.0, 1.0, 0.5, 128.0 / 255.0]);
        let img = gradient_to_image(&g);
        assert_eq!(img.pixels(), &[0, 255, 128, 128]);
    }

    #[test]
    fn csv_rendering_is_row_major() {
        let g = GradientMap::new(2, 2, vec![0.0, 0.25, 0.5, 1.0]);
        assert_eq!(g.to_csv(), "0,0.25\n0.5,1\n");
    }

    #[test]
    fn binary_baseline_without_flips_is_the_reference() {
        let img = GrayImage::from_fn(10, 10, |x, y| ((x * 13 + y * 7) % 256) as u8).unwrap();
        let base = binary_reference_with_flips(&img, 0.0, &EntropySource::new(6)).unwrap();
        assert_eq!(base, reference_roberts(&img).unwrap());
    }

    #[test]
    fn binary_baseline_rejects_bad_rates() {
        let img = GrayImage::constant(4, 4, 0).unwrap();
        for rate in [-0.1, 0.6, f64::NAN] {
            assert!(matches!(
                binary_reference_with_flips(&img, rate, &EntropySource::new(1)),
                Err(Error::InvalidFlipRate(_))
            ));
        }
    }

    #[test]
    fn msb_flip_moves_a_pixel_by_128_levels() {
        for pixel in [0u8, 37, 200, 255] {
            assert_eq!(
                i16::from(pixel ^ 0x80) - i16::from(pixel),
                if pixel < 128 { 128 } else { -128 }
            );
        }
    }

    #[test]
    fn mean_abs_diff_checks_shape() {
        let a = GradientMap::new(2, 2, vec![0.0; 4]);
        let b = GradientMap::new(2, 1, vec![0.0; 2]);
        assert!(matches!(
            a.mean_abs_diff(&b),
            Err(Error::DimensionMismatch(..))
        ));
        assert_eq!(a.mean_abs_diff(&a).unwrap(), 0.0);
    }
}
