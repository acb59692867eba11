//! Frame sequences and reportable pipeline runs.
//!
//! [`process_sequence`] runs the stochastic detector over an ordered set of
//! equal-sized frames. Frame `k` draws from the substream `frame/k` of the
//! configured seed, so every frame's streams are independent of the others
//! yet the whole run is a pure function of (frames, config). The returned
//! [`RunReport`] echoes the configuration and per-frame fidelity metrics;
//! everything in it can be regenerated from the echoed values.

use crate::bitstream::{FlipMode, FlipSpec};
use crate::entropy::EntropySource;
use crate::error::{Error, Result};
use crate::image::{read_pgm, GrayImage};
use crate::metrics::{psnr, ssim, Psnr};
use crate::roberts::{
    gradient_to_image, reference_roberts, stochastic_roberts_with, DetectorConfig, GradientMap,
    StreamSource,
};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::{Duration, Instant};

/// An ordered list of equal-sized frames with their source labels.
#[derive(Clone, Debug)]
pub struct FrameSequence {
    frames: Vec<GrayImage>,
    labels: Vec<String>,
}

impl FrameSequence {
    pub fn new(frames: Vec<GrayImage>, labels: Vec<String>) -> Result<FrameSequence> {
        if frames.is_empty() {
            return Err(Error::EmptySequence);
        }
        assert_eq!(
            frames.len(),
            labels.len(),
            "one label per frame ({} frames, {} labels)",
            frames.len(),
            labels.len()
        );
        let (w, h) = (frames[0].width(), frames[0].height());
        for (index, frame) in frames.iter().enumerate() {
            if frame.width() != w || frame.height() != h {
                return Err(Error::FrameDimensionMismatch {
                    index,
                    width: frame.width(),
                    height: frame.height(),
                    expected_width: w,
                    expected_height: h,
                });
            }
        }
        Ok(FrameSequence { frames, labels })
    }

    /// Loads every `.pgm` file in a directory, ordered by filename.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<FrameSequence> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .map(|entry| entry.path())
            .filter(|p| {
                p.extension()
                    .map(|e| e.eq_ignore_ascii_case("pgm"))
                    .unwrap_or(false)
            })
            .collect();
        paths.sort();
        let mut frames = Vec::with_capacity(paths.len());
        let mut labels = Vec::with_capacity(paths.len());
        for path in paths {
            frames.push(read_pgm(&path)?);
            labels.push(
                path.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            );
        }
        FrameSequence::new(frames, labels)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn frames(&self) -> &[GrayImage] {
        &self.frames
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// The configuration a run actually used, echoed into its report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub bits: usize,
    pub flip_mode: Option<FlipMode>,
    pub flip_rate: Option<f64>,
    pub seed: u64,
    pub source: StreamSource,
}

impl ConfigEcho {
    pub fn from_config(cfg: &DetectorConfig) -> ConfigEcho {
        ConfigEcho {
            bits: cfg.bits,
            flip_mode: cfg.flip.map(|f| f.mode()),
            flip_rate: cfg.flip.map(|f| f.rate()),
            seed: cfg.seed,
            source: cfg.source,
        }
    }

    pub fn to_config(&self) -> Result<DetectorConfig> {
        let flip = match (self.flip_mode, self.flip_rate) {
            (Some(mode), Some(rate)) => Some(FlipSpec::new(mode, rate)?),
            _ => None,
        };
        Ok(DetectorConfig {
            bits: self.bits,
            flip,
            seed: self.seed,
            source: self.source,
        })
    }
}

/// Fidelity of one frame's stochastic gradient against the exact one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameMetrics {
    pub index: usize,
    pub label: String,
    pub ssim_mean: f64,
    pub ssim_fallback_window: bool,
    pub psnr: Psnr,
}

/// Summary of a detector run: config echo, per-frame metrics, and the
/// artifact paths written (filled in by whoever writes files).
///
/// Wall-clock time is tracked for operator feedback but deliberately not
/// serialized: reports from identical (input, config, seed) must be
/// byte-identical.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub frames: Vec<FrameMetrics>,
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Runs the stochastic detector on each frame and measures it against the
/// exact detector. Frame `k` uses substream `frame/k` of `cfg.seed`;
/// failures carry the frame index.
pub fn process_sequence(
    seq: &FrameSequence,
    cfg: &DetectorConfig,
) -> Result<(Vec<GradientMap>, RunReport)> {
    let started = Instant::now();
    let root = EntropySource::new(cfg.seed);
    let mut maps = Vec::with_capacity(seq.len());
    let mut metrics = Vec::with_capacity(seq.len());
    for (index, frame) in seq.frames().iter().enumerate() {
        let attach = |source: Error| Error::Frame {
            index,
            source: Box::new(source),
        };
        let frame_src = root.substream(format!("frame/{index}"));
        let map = stochastic_roberts_with(frame, cfg, &frame_src).map_err(attach)?;
        let reference = reference_roberts(frame).map_err(attach)?;
        let got = gradient_to_image(&map);
        let want = gradient_to_image(&reference);
        let similarity = ssim(&got, &want).map_err(attach)?;
        let ratio = psnr(&got, &want).map_err(attach)?;
        metrics.push(FrameMetrics {
            index,
            label: seq.labels()[index].clone(),
            ssim_mean: similarity.mean(),
            ssim_fallback_window: similarity.used_fallback_window(),
            psnr: ratio,
        });
        maps.push(map);
    }
    let report = RunReport {
        config: ConfigEcho::from_config(cfg),
        frames: metrics,
        artifacts: Vec::new(),
        elapsed: started.elapsed(),
    };
    Ok((maps, report))
}
