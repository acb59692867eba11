//! The seven subcommands. Each resolves its inputs (flag, then config
//! file, then default), runs the core pipeline, writes artifacts
//! atomically, and prints a machine-readable summary to stdout.

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use scsim_core::bitstream::{
    encode, encode_pair, inject_flips, inject_flips_pair, scc, CorrelationMode, FlipMode, FlipSpec,
};
use scsim_core::device::{iid_trajectory, ou_trajectory, MemristorParams, SneMode};
use scsim_core::entropy::EntropySource;
use scsim_core::image::{pgm_to_bytes, read_pgm, GrayImage};
use scsim_core::logic::{verify_gate, verify_mux, GateKind};
use scsim_core::metrics::{psnr, ssim, Psnr};
use scsim_core::roberts::{
    binary_reference_with_flips, gradient_to_image, reference_roberts, stochastic_roberts,
    DetectorConfig, StreamSource,
};
use scsim_core::sequence::{process_sequence, ConfigEcho, FrameMetrics, FrameSequence, RunReport};
use scsim_core::stream_io::{streams_to_bytes, StreamFormat};

use crate::config::FileConfig;
use crate::output::{display_path, resolve_out_dir, write_atomic};
use crate::{
    CompareArgs, DetectArgs, DeviceArgs, EncodeArgs, Failure, GateArgs, SweepBitsArgs,
    SweepFlipsArgs,
};

fn require<T>(name: &str, value: Option<T>) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::usage(format!("--{name} is required (flag or config file)")))
}

fn parse_choice<T: FromStr>(name: &str, value: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Failure::usage(format!("--{name}: {e}")))
}

fn parse_list<T: FromStr>(name: &str, text: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    let items: Result<Vec<T>, Failure> = text
        .split(',')
        .map(|part| parse_choice(name, part.trim()))
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err(Failure::usage(format!("--{name} must not be empty")));
    }
    Ok(items)
}

fn resolve_flip(mode: Option<String>, rate: Option<f64>) -> Result<Option<FlipSpec>, Failure> {
    match (mode, rate) {
        (None, None) => Ok(None),
        (Some(mode), Some(rate)) => {
            let mode: FlipMode = parse_choice("flip-mode", &mode)?;
            Ok(Some(FlipSpec::new(mode, rate)?))
        }
        (Some(_), None) => Err(Failure::usage("--flip-mode also needs --flip-rate")),
        (None, Some(_)) => Err(Failure::usage("--flip-rate also needs --flip-mode")),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure {
        kind: "io",
        message: e.to_string(),
    })?;
    println!("{text}");
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure {
        kind: "io",
        message: e.to_string(),
    })?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Reads a PGM file, naming the path in any I/O failure.
fn read_image(path: &Path) -> Result<GrayImage, Failure> {
    read_pgm(path).map_err(|e| match e {
        scsim_core::Error::Io(io) => Failure {
            kind: "io",
            message: format!("{}: {io}", path.display()),
        },
        other => other.into(),
    })
}

#[derive(Serialize)]
struct EncodeSummary {
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pb: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<CorrelationMode>,
    bits: usize,
    seed: u64,
    format: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    flip_mode: Option<FlipMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flip_rate: Option<f64>,
    decoded: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scc: Option<f64>,
    path: String,
}

pub fn cmd_encode(args: EncodeArgs, file: &FileConfig) -> Result<(), Failure> {
    let seed = require("seed", args.seed.or(file.seed))?;
    let p = require("p", args.p.or(file.p))?;
    let bits = require("bits", args.bits.or(file.bits))?;
    let pb = args.pb.or(file.pb);
    let mode_text = args.mode.or_else(|| file.mode.clone());
    let format_text = args
        .format
        .or_else(|| file.format.clone())
        .unwrap_or_else(|| "text".to_string());
    let format: StreamFormat = parse_choice("format", &format_text)?;
    let flip = resolve_flip(
        args.flip_mode.or_else(|| file.flip_mode.clone()),
        args.flip_rate.or(file.flip_rate),
    )?;

    let src = EntropySource::new(seed);
    let (streams, mode, correlation) = match pb {
        Some(pb) => {
            let mode: CorrelationMode = match mode_text {
                Some(text) => parse_choice("mode", &text)?,
                None => CorrelationMode::Uncorrelated,
            };
            let (a, b) = encode_pair(p, pb, bits, mode, &src)?;
            let (a, b) = match &flip {
                Some(spec) => inject_flips_pair(&a, &b, spec, &src.substream("flips"))?,
                None => (a, b),
            };
            let c = scc(&a, &b)?;
            (vec![a, b], Some(mode), Some(c))
        }
        None => {
            if mode_text.is_some() {
                return Err(Failure::usage(
                    "--mode sets a pair's correlation; also give --pb",
                ));
            }
            let s = encode(p, bits, &src)?;
            let s = match &flip {
                Some(spec) => inject_flips(&s, spec, &src.substream("flips"))?,
                None => s,
            };
            (vec![s], None, None)
        }
    };

    let dir = resolve_out_dir(args.out.or_else(|| file.out.clone()));
    let (format_name, filename) = match format {
        StreamFormat::Text => ("text", "streams.txt"),
        StreamFormat::Packed => ("packed", "streams.snb"),
    };
    let path = dir.join(filename);
    write_atomic(&path, &streams_to_bytes(&streams, format))?;

    print_json(&EncodeSummary {
        p,
        pb,
        mode,
        bits,
        seed,
        format: format_name,
        flip_mode: flip.map(|f| f.mode()),
        flip_rate: flip.map(|f| f.rate()),
        decoded: streams.iter().map(|s| s.value()).collect(),
        scc: correlation,
        path: display_path(&path),
    })
}

pub fn cmd_gate(args: GateArgs, file: &FileConfig) -> Result<(), Failure> {
    let seed = require("seed", args.seed.or(file.seed))?;
    let kind_text = require("kind", args.kind.or_else(|| file.kind.clone()))?;
    let mode_text = require("mode", args.mode.or_else(|| file.mode.clone()))?;
    let kind: GateKind = parse_choice("kind", &kind_text)?;
    let mode: CorrelationMode = parse_choice("mode", &mode_text)?;
    let pa = require("pa", args.pa.or(file.pa))?;
    let pb = require("pb", args.pb.or(file.pb))?;
    let ps = args.ps.or(file.ps);
    let bits = args.bits.or(file.bits).unwrap_or(100_000);

    let src = EntropySource::new(seed);
    let report = match (kind, ps) {
        (GateKind::Mux, Some(ps)) if mode == CorrelationMode::Uncorrelated => {
            verify_mux(pa, pb, ps, bits, &src)?
        }
        _ => {
            if kind != GateKind::Mux && ps.is_some() {
                return Err(Failure::usage("--ps only applies to --kind mux"));
            }
            verify_gate(kind, mode, pa, pb, bits, &src)?
        }
    };

    if let Some(out) = args.out.or_else(|| file.out.clone()) {
        write_atomic(&out.join("report.json"), &json_bytes(&report)?)?;
    }
    print_json(&report)
}

fn detector_config(
    bits: usize,
    flip: Option<FlipSpec>,
    seed: u64,
    source_text: Option<String>,
) -> Result<DetectorConfig, Failure> {
    let source: StreamSource = match source_text {
        Some(text) => parse_choice("source", &text)?,
        None => StreamSource::Analytic,
    };
    Ok(DetectorConfig {
        bits,
        flip,
        seed,
        source,
    })
}

pub fn cmd_detect(args: DetectArgs, file: &FileConfig) -> Result<(), Failure> {
    let seed = require("seed", args.seed.or(file.seed))?;
    let input = require("input", args.input.or_else(|| file.input.clone()))?;
    let bits = args.bits.or(file.bits).unwrap_or(256);
    let flip = resolve_flip(
        args.flip_mode.or_else(|| file.flip_mode.clone()),
        args.flip_rate.or(file.flip_rate),
    )?;
    let cfg = detector_config(
        bits,
        flip,
        seed,
        args.source.or_else(|| file.source.clone()),
    )?;
    let dir = resolve_out_dir(args.out.or_else(|| file.out.clone()));

    let report = if input.is_dir() {
        detect_sequence(&input, &cfg, &dir)?
    } else {
        detect_single(&input, &cfg, &dir)?
    };
    eprintln!(
        "detect: {} frame(s) in {:?}",
        report.frames.len(),
        report.elapsed
    );
    print_json(&report)
}

fn detect_single(input: &Path, cfg: &DetectorConfig, dir: &Path) -> Result<RunReport, Failure> {
    let started = Instant::now();
    let img = read_image(input)?;
    let map = stochastic_roberts(&img, cfg)?;
    let reference = reference_roberts(&img)?;
    let got = gradient_to_image(&map);
    let want = gradient_to_image(&reference);
    let similarity = ssim(&got, &want)?;
    let fidelity = psnr(&got, &want)?;

    let gradient_path = dir.join("gradient.pgm");
    let reference_path = dir.join("reference.pgm");
    let map_path = dir.join("ssim_map.pgm");
    let report_path = dir.join("report.json");
    write_atomic(&gradient_path, &pgm_to_bytes(&got))?;
    write_atomic(&reference_path, &pgm_to_bytes(&want))?;
    write_atomic(&map_path, &pgm_to_bytes(&similarity.map_image()))?;

    let report = RunReport {
        config: ConfigEcho::from_config(cfg),
        frames: vec![FrameMetrics {
            index: 0,
            label: file_label(input),
            ssim_mean: similarity.mean(),
            ssim_fallback_window: similarity.used_fallback_window(),
            psnr: fidelity,
        }],
        artifacts: vec![
            display_path(&gradient_path),
            display_path(&reference_path),
            display_path(&map_path),
            display_path(&report_path),
        ],
        elapsed: started.elapsed(),
    };
    write_atomic(&report_path, &json_bytes(&report)?)?;
    Ok(report)
}

fn detect_sequence(input: &Path, cfg: &DetectorConfig, dir: &Path) -> Result<RunReport, Failure> {
    let seq = FrameSequence::from_dir(input)?;
    let (maps, mut report) = process_sequence(&seq, cfg)?;
    for (map, label) in maps.iter().zip(seq.labels()) {
        let stem = Path::new(label)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| label.clone());
        let path = dir.join(format!("gradient_{stem}.pgm"));
        write_atomic(&path, &pgm_to_bytes(&gradient_to_image(map)))?;
        report.artifacts.push(display_path(&path));
    }
    let report_path = dir.join("report.json");
    report.artifacts.push(display_path(&report_path));
    write_atomic(&report_path, &json_bytes(&report)?)?;
    Ok(report)
}

pub fn cmd_sweep_bits(args: SweepBitsArgs, file: &FileConfig) -> Result<(), Failure> {
    let seed = require("seed", args.seed.or(file.seed))?;
    let input = require("input", args.input.or_else(|| file.input.clone()))?;
    let lengths_text = args
        .bit_lengths
        .or_else(|| file.bit_lengths.clone())
        .unwrap_or_else(|| "4,16,64,256".to_string());
    let lengths: Vec<usize> = parse_list("bit-lengths", &lengths_text)?;
    let source = args.source.or_else(|| file.source.clone());
    let dir = resolve_out_dir(args.out.or_else(|| file.out.clone()));

    let img = read_image(&input)?;
    let want = gradient_to_image(&reference_roberts(&img)?);
    let mut table = String::from("bits,ssim,psnr\n");
    for &bits in &lengths {
        let cfg = detector_config(bits, None, seed, source.clone())?;
        let got = gradient_to_image(&stochastic_roberts(&img, &cfg)?);
        let s = ssim(&got, &want)?.mean();
        let p = psnr(&got, &want)?;
        table.push_str(&format!("{bits},{s},{p}\n"));
        write_atomic(
            &dir.join(format!("gradient_b{bits}.pgm")),
            &pgm_to_bytes(&got),
        )?;
    }
    write_atomic(&dir.join("sweep_bits.csv"), table.as_bytes())?;
    print!("{table}");
    Ok(())
}

fn rate_label(rate: f64) -> String {
    format!("{rate}").replace('.', "p")
}

pub fn cmd_sweep_flips(args: SweepFlipsArgs, file: &FileConfig) -> Result<(), Failure> {
    let seed = require("seed", args.seed.or(file.seed))?;
    let input = require("input", args.input.or_else(|| file.input.clone()))?;
    let bits = args.bits.or(file.bits).unwrap_or(256);
    let mode_text = require(
        "flip-mode",
        args.flip_mode.or_else(|| file.flip_mode.clone()),
    )?;
    let mode: FlipMode = parse_choice("flip-mode", &mode_text)?;
    let rates_text = args
        .rates
        .or_else(|| file.rates.clone())
        .unwrap_or_else(|| "0,0.025,0.05,0.1,0.2,0.3,0.4,0.5".to_string());
    let rates: Vec<f64> = parse_list("rates", &rates_text)?;
    for &rate in &rates {
        FlipSpec::new(mode, rate)?;
    }
    let source = args.source.or_else(|| file.source.clone());
    let dir = resolve_out_dir(args.out.or_else(|| file.out.clone()));

    let img = read_image(&input)?;
    let want = gradient_to_image(&reference_roberts(&img)?);
    let binary_src = EntropySource::new(seed);
    let mut table = String::from("rate,ssim,psnr,binary_ssim,binary_psnr\n");
    for (i, &rate) in rates.iter().enumerate() {
        let flip = FlipSpec::new(mode, rate)?;
        let cfg = detector_config(bits, Some(flip), seed, source.clone())?;
        let got = gradient_to_image(&stochastic_roberts(&img, &cfg)?);
        let s = ssim(&got, &want)?.mean();
        let p = psnr(&got, &want)?;

        let baseline =
            binary_reference_with_flips(&img, rate, &binary_src.substream(format!("binary/{i}")))?;
        let baseline_img = gradient_to_image(&baseline);
        let bs = ssim(&baseline_img, &want)?.mean();
        let bp = psnr(&baseline_img, &want)?;

        table.push_str(&format!("{rate},{s},{p},{bs},{bp}\n"));
        let label = rate_label(rate);
        write_atomic(
            &dir.join(format!("gradient_r{label}.pgm")),
            &pgm_to_bytes(&got),
        )?;
        write_atomic(
            &dir.join(format!("binary_r{label}.pgm")),
            &pgm_to_bytes(&baseline_img),
        )?;
    }
    write_atomic(&dir.join("sweep_flips.csv"), table.as_bytes())?;
    print!("{table}");
    Ok(())
}

#[derive(Serialize)]
struct DeviceSummary {
    cycles: usize,
    mode: SneMode,
    seed: u64,
    mean: f64,
    std: Option<f64>,
    std_undefined: bool,
    stationary_mean: f64,
    stationary_std: f64,
    trajectory: String,
}

pub fn cmd_device(args: DeviceArgs, file: &FileConfig) -> Result<(), Failure> {
    let seed = require("seed", args.seed.or(file.seed))?;
    let cycles = require("cycles", args.cycles.or(file.cycles))?;
    if cycles == 0 {
        return Err(Failure::usage("--cycles must be at least 1"));
    }
    let mode: SneMode = match args.mode.or_else(|| file.mode.clone()) {
        Some(text) => parse_choice("mode", &text)?,
        None => SneMode::Ou,
    };
    let params = match args.params.or_else(|| file.params.clone()) {
        Some(path) => MemristorParams::from_toml_str(&std::fs::read_to_string(path)?)?,
        None => MemristorParams::default(),
    };
    let dir = resolve_out_dir(args.out.or_else(|| file.out.clone()));

    let src = EntropySource::new(seed);
    let trajectory = match mode {
        SneMode::Ou => ou_trajectory(&params, cycles, &src)?,
        SneMode::Iid => iid_trajectory(&params, cycles, &src)?,
    };

    let mut table = String::from("cycle,vth\n");
    for (i, v) in trajectory.iter().enumerate() {
        table.push_str(&format!("{},{v}\n", i + 1));
    }
    let path = dir.join("trajectory.csv");
    write_atomic(&path, table.as_bytes())?;

    let mean = trajectory.iter().sum::<f64>() / cycles as f64;
    let std = (cycles >= 2).then(|| {
        (trajectory.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (cycles - 1) as f64).sqrt()
    });
    print_json(&DeviceSummary {
        cycles,
        mode,
        seed,
        mean,
        std,
        std_undefined: std.is_none(),
        stationary_mean: params.mu,
        stationary_std: params.stationary_std(),
        trajectory: display_path(&path),
    })
}

#[derive(Serialize)]
struct CompareSummary {
    a: String,
    b: String,
    seed: u64,
    ssim_mean: f64,
    ssim_fallback_window: bool,
    psnr: Psnr,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<String>,
}

pub fn cmd_compare(args: CompareArgs, file: &FileConfig) -> Result<(), Failure> {
    let seed = require("seed", args.seed.or(file.seed))?;
    let path_a = require("a", args.a.or_else(|| file.a.clone()))?;
    let path_b = require("b", args.b.or_else(|| file.b.clone()))?;
    let img_a: GrayImage = read_image(&path_a)?;
    let img_b: GrayImage = read_image(&path_b)?;
    let similarity = ssim(&img_a, &img_b)?;
    let fidelity = psnr(&img_a, &img_b)?;

    let map = match args.out.or_else(|| file.out.clone()) {
        Some(out) => {
            let path = out.join("ssim_map.pgm");
            write_atomic(&path, &pgm_to_bytes(&similarity.map_image()))?;
            Some(display_path(&path))
        }
        None => None,
    };

    print_json(&CompareSummary {
        a: display_path(&path_a),
        b: display_path(&path_b),
        seed,
        ssim_mean: similarity.mean(),
        ssim_fallback_window: similarity.used_fallback_window(),
        psnr: fidelity,
        map,
    })
}
