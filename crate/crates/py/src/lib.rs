//! Python bindings: bitstream encoding, gates, the device model, the edge
//! detector, and image metrics under one `scsim` module.
//!
//! Thin wrappers only; all semantics live in the core crate. Enum-valued
//! arguments arrive as strings ("positive", "shared-mask", ...) matching
//! the CLI flags.

use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use scsim_core::bitstream::{self, BitStream, CorrelationMode, FlipMode, FlipSpec};
use scsim_core::device::{self, MemristorParams, SneMode, SneTransfer};
use scsim_core::entropy::EntropySource;
use scsim_core::image::GrayImage;
use scsim_core::logic::{self, GateKind, VerificationReport};
use scsim_core::metrics::{self, Psnr, SsimResult};
use scsim_core::roberts::{self, DetectorConfig, GradientMap, StreamSource};
use scsim_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr>(value: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| PyValueError::new_err(format!("{e}")))
}

/// Packed bit sequence decoding to the fraction of 1s.
#[pyclass(name = "BitStream", frozen)]
struct PyBitStream {
    inner: BitStream,
}

#[pymethods]
impl PyBitStream {
    #[staticmethod]
    fn from_bits(bits: Vec<bool>) -> PyResult<PyBitStream> {
        Ok(PyBitStream {
            inner: BitStream::from_bits(&bits).map_err(to_py)?,
        })
    }

    fn value(&self) -> f64 {
        self.inner.value()
    }

    fn ones(&self) -> u64 {
        self.inner.ones()
    }

    fn bits(&self) -> Vec<bool> {
        self.inner.bits()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __getitem__(&self, index: isize) -> PyResult<bool> {
        let len = self.inner.len() as isize;
        let i = if index < 0 { index + len } else { index };
        if i < 0 || i >= len {
            return Err(PyIndexError::new_err("bit index out of range"));
        }
        Ok(self.inner.get(i as usize))
    }

    fn __eq__(&self, other: &PyBitStream) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "BitStream(len={}, value={})",
            self.inner.len(),
            self.inner.value()
        )
    }
}

/// 8-bit grayscale image.
#[pyclass(name = "GrayImage", frozen)]
struct PyGrayImage {
    inner: GrayImage,
}

#[pymethods]
impl PyGrayImage {
    #[new]
    fn new(width: usize, height: usize, pixels: Vec<u8>) -> PyResult<PyGrayImage> {
        Ok(PyGrayImage {
            inner: GrayImage::new(width, height, pixels).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn constant(width: usize, height: usize, value: u8) -> PyResult<PyGrayImage> {
        Ok(PyGrayImage {
            inner: GrayImage::constant(width, height, value).map_err(to_py)?,
        })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    fn pixels<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.inner.pixels())
    }

    fn get(&self, x: usize, y: usize) -> PyResult<u8> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(PyIndexError::new_err("pixel out of range"));
        }
        Ok(self.inner.get(x, y))
    }

    fn __eq__(&self, other: &PyGrayImage) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("GrayImage({}x{})", self.inner.width(), self.inner.height())
    }
}

/// Edge magnitudes in [0, 1], one per 2x2 window of the source image.
#[pyclass(name = "GradientMap", frozen)]
struct PyGradientMap {
    inner: GradientMap,
}

#[pymethods]
impl PyGradientMap {
    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    fn get(&self, x: usize, y: usize) -> PyResult<f64> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(PyIndexError::new_err("gradient pixel out of range"));
        }
        Ok(self.inner.get(x, y))
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn to_image(&self) -> PyGrayImage {
        PyGrayImage {
            inner: roberts::gradient_to_image(&self.inner),
        }
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn mean_abs_diff(&self, other: &PyGradientMap) -> PyResult<f64> {
        self.inner.mean_abs_diff(&other.inner).map_err(to_py)
    }

    fn __eq__(&self, other: &PyGradientMap) -> bool {
        self.inner == other.inner
    }
}

/// Structural-similarity comparison: mean score plus the per-window map.
#[pyclass(name = "SsimResult", frozen)]
struct PySsimResult {
    inner: SsimResult,
}

#[pymethods]
impl PySsimResult {
    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn used_fallback_window(&self) -> bool {
        self.inner.used_fallback_window()
    }

    fn map_image(&self) -> PyGrayImage {
        PyGrayImage {
            inner: self.inner.map_image(),
        }
    }
}

#[pyfunction]
fn encode(p: f64, bits: usize, seed: u64) -> PyResult<PyBitStream> {
    Ok(PyBitStream {
        inner: bitstream::encode(p, bits, &EntropySource::new(seed)).map_err(to_py)?,
    })
}

#[pyfunction]
fn encode_pair(
    pa: f64,
    pb: f64,
    bits: usize,
    mode: &str,
    seed: u64,
) -> PyResult<(PyBitStream, PyBitStream)> {
    let mode: CorrelationMode = parse(mode)?;
    let (a, b) =
        bitstream::encode_pair(pa, pb, bits, mode, &EntropySource::new(seed)).map_err(to_py)?;
    Ok((PyBitStream { inner: a }, PyBitStream { inner: b }))
}

#[pyfunction]
fn scc(a: PyRef<PyBitStream>, b: PyRef<PyBitStream>) -> PyResult<f64> {
    bitstream::scc(&a.inner, &b.inner).map_err(to_py)
}

#[pyfunction]
fn inject_flips(
    stream: PyRef<PyBitStream>,
    mode: &str,
    rate: f64,
    seed: u64,
) -> PyResult<PyBitStream> {
    let mode: FlipMode = parse(mode)?;
    let spec = FlipSpec::new(mode, rate).map_err(to_py)?;
    Ok(PyBitStream {
        inner: bitstream::inject_flips(&stream.inner, &spec, &EntropySource::new(seed))
            .map_err(to_py)?,
    })
}

#[pyfunction]
fn inject_flips_pair(
    a: PyRef<PyBitStream>,
    b: PyRef<PyBitStream>,
    mode: &str,
    rate: f64,
    seed: u64,
) -> PyResult<(PyBitStream, PyBitStream)> {
    let mode: FlipMode = parse(mode)?;
    let spec = FlipSpec::new(mode, rate).map_err(to_py)?;
    let (fa, fb) =
        bitstream::inject_flips_pair(&a.inner, &b.inner, &spec, &EntropySource::new(seed))
            .map_err(to_py)?;
    Ok((PyBitStream { inner: fa }, PyBitStream { inner: fb }))
}

#[pyfunction]
fn gate_apply(kind: &str, a: PyRef<PyBitStream>, b: PyRef<PyBitStream>) -> PyResult<PyBitStream> {
    let kind: GateKind = parse(kind)?;
    Ok(PyBitStream {
        inner: logic::gate_apply(kind, &a.inner, &b.inner).map_err(to_py)?,
    })
}

#[pyfunction]
fn gate_mux(
    a: PyRef<PyBitStream>,
    b: PyRef<PyBitStream>,
    select: PyRef<PyBitStream>,
) -> PyResult<PyBitStream> {
    Ok(PyBitStream {
        inner: logic::gate_mux(&a.inner, &b.inner, &select.inner).map_err(to_py)?,
    })
}

#[pyfunction]
#[pyo3(signature = (kind, mode, pa, pb, ps=None))]
fn oracle(kind: &str, mode: &str, pa: f64, pb: f64, ps: Option<f64>) -> PyResult<f64> {
    let kind: GateKind = parse(kind)?;
    let mode: CorrelationMode = parse(mode)?;
    logic::oracle(kind, mode, pa, pb, ps).map_err(to_py)
}

fn report_dict<'py>(py: Python<'py>, r: &VerificationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("gate", r.gate.as_str())?;
    d.set_item("mode", r.mode.as_str())?;
    d.set_item("pa", r.pa)?;
    d.set_item("pb", r.pb)?;
    d.set_item("ps", r.ps)?;
    d.set_item("n", r.n)?;
    d.set_item("predicted", r.predicted)?;
    d.set_item("measured", r.measured)?;
    d.set_item("abs_error", r.abs_error)?;
    Ok(d)
}

#[pyfunction]
fn verify_gate<'py>(
    py: Python<'py>,
    kind: &str,
    mode: &str,
    pa: f64,
    pb: f64,
    bits: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let kind: GateKind = parse(kind)?;
    let mode: CorrelationMode = parse(mode)?;
    let report =
        logic::verify_gate(kind, mode, pa, pb, bits, &EntropySource::new(seed)).map_err(to_py)?;
    report_dict(py, &report)
}

#[pyfunction]
fn verify_mux<'py>(
    py: Python<'py>,
    pa: f64,
    pb: f64,
    ps: f64,
    bits: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let report = logic::verify_mux(pa, pb, ps, bits, &EntropySource::new(seed)).map_err(to_py)?;
    report_dict(py, &report)
}

#[pyfunction]
fn read_pgm(path: &str) -> PyResult<PyGrayImage> {
    Ok(PyGrayImage {
        inner: scsim_core::image::read_pgm(path).map_err(to_py)?,
    })
}

#[pyfunction]
fn write_pgm(img: PyRef<PyGrayImage>, path: &str) -> PyResult<()> {
    scsim_core::image::write_pgm(path, &img.inner).map_err(to_py)
}

#[pyfunction]
fn reference_roberts(img: PyRef<PyGrayImage>) -> PyResult<PyGradientMap> {
    Ok(PyGradientMap {
        inner: roberts::reference_roberts(&img.inner).map_err(to_py)?,
    })
}

#[pyfunction]
#[pyo3(signature = (img, bits, seed, flip_mode=None, flip_rate=None, source="analytic"))]
fn stochastic_roberts(
    img: PyRef<PyGrayImage>,
    bits: usize,
    seed: u64,
    flip_mode: Option<&str>,
    flip_rate: Option<f64>,
    source: &str,
) -> PyResult<PyGradientMap> {
    let flip = match (flip_mode, flip_rate) {
        (None, None) => None,
        (Some(mode), Some(rate)) => {
            let mode: FlipMode = parse(mode)?;
            Some(FlipSpec::new(mode, rate).map_err(to_py)?)
        }
        _ => return Err(PyValueError::new_err("flip_mode and flip_rate go together")),
    };
    let source: StreamSource = parse(source)?;
    let cfg = DetectorConfig {
        bits,
        flip,
        seed,
        source,
    };
    Ok(PyGradientMap {
        inner: roberts::stochastic_roberts(&img.inner, &cfg).map_err(to_py)?,
    })
}

#[pyfunction]
fn binary_reference_with_flips(
    img: PyRef<PyGrayImage>,
    rate: f64,
    seed: u64,
) -> PyResult<PyGradientMap> {
    Ok(PyGradientMap {
        inner: roberts::binary_reference_with_flips(&img.inner, rate, &EntropySource::new(seed))
            .map_err(to_py)?,
    })
}

#[pyfunction]
fn ssim(a: PyRef<PyGrayImage>, b: PyRef<PyGrayImage>) -> PyResult<PySsimResult> {
    Ok(PySsimResult {
        inner: metrics::ssim(&a.inner, &b.inner).map_err(to_py)?,
    })
}

#[pyfunction]
fn psnr(a: PyRef<PyGrayImage>, b: PyRef<PyGrayImage>) -> PyResult<f64> {
    Ok(match metrics::psnr(&a.inner, &b.inner).map_err(to_py)? {
        Psnr::Infinite => f64::INFINITY,
        Psnr::Decibels(db) => db,
    })
}

#[pyfunction]
#[pyo3(signature = (cycles, seed, mode="ou"))]
fn vth_trajectory(cycles: usize, seed: u64, mode: &str) -> PyResult<Vec<f64>> {
    let mode: SneMode = parse(mode)?;
    let params = MemristorParams::default();
    let src = EntropySource::new(seed);
    match mode {
        SneMode::Ou => device::ou_trajectory(&params, cycles, &src),
        SneMode::Iid => device::iid_trajectory(&params, cycles, &src),
    }
    .map_err(to_py)
}

#[pyfunction]
fn p_uncorrelated(v_in: f64) -> f64 {
    device::p_uncorrelated(v_in, &SneTransfer::default())
}

#[pyfunction]
fn v_in_for(p: f64) -> PyResult<f64> {
    device::v_in_for(p, &SneTransfer::default()).map_err(to_py)
}

#[pyfunction]
fn p_positive(v_ref: f64) -> f64 {
    device::p_positive(v_ref, &SneTransfer::default())
}

#[pyfunction]
fn v_ref_for_positive(target: f64) -> PyResult<f64> {
    device::v_ref_for_positive(target, &SneTransfer::default()).map_err(to_py)
}

#[pyfunction]
fn sne_sample_pair(
    target_pa: f64,
    target_pb: f64,
    bits: usize,
    seed: u64,
) -> PyResult<(PyBitStream, PyBitStream)> {
    let (a, b) = device::sne_sample_pair(
        target_pa,
        target_pb,
        bits,
        &SneTransfer::default(),
        &EntropySource::new(seed),
    )
    .map_err(to_py)?;
    Ok((PyBitStream { inner: a }, PyBitStream { inner: b }))
}

#[pymodule]
fn scsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBitStream>()?;
    m.add_class::<PyGrayImage>()?;
    m.add_class::<PyGradientMap>()?;
    m.add_class::<PySsimResult>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(encode_pair, m)?)?;
    m.add_function(wrap_pyfunction!(scc, m)?)?;
    m.add_function(wrap_pyfunction!(inject_flips, m)?)?;
    m.add_function(wrap_pyfunction!(inject_flips_pair, m)?)?;
    m.add_function(wrap_pyfunction!(gate_apply, m)?)?;
    m.add_function(wrap_pyfunction!(gate_mux, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(verify_gate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_mux, m)?)?;
    m.add_function(wrap_pyfunction!(read_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(write_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(reference_roberts, m)?)?;
    m.add_function(wrap_pyfunction!(stochastic_roberts, m)?)?;
    m.add_function(wrap_pyfunction!(binary_reference_with_flips, m)?)?;
    m.add_function(wrap_pyfunction!(ssim, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(vth_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(p_uncorrelated, m)?)?;
    m.add_function(wrap_pyfunction!(v_in_for, m)?)?;
    m.add_function(wrap_pyfunction!(p_positive, m)?)?;
    m.add_function(wrap_pyfunction!(v_ref_for_positive, m)?)?;
    m.add_function(wrap_pyfunction!(sne_sample_pair, m)?)?;
    Ok(())
}
