//! Stochastic logic gates and their closed-form output probabilities.
//!
//! Applied bit-by-bit to unipolar streams, Boolean gates compute arithmetic
//! whose result depends on the correlation between the inputs: AND ranges
//! from multiplication (uncorrelated) to minimum (positive), XOR on a
//! positive pair computes absolute difference, and a MUX with an
//! independent select computes a weighted mean. [`oracle`] returns the
//! closed-form value for each gate and correlation mode; [`verify_gate`]
//! and [`verify_mux`] measure one seeded run against it.

use crate::bitstream::{encode, encode_pair, BitStream, CorrelationMode};
use crate::entropy::EntropySource;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    And,
    Or,
    Xor,
    Mux,
}

impl GateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Xor => "xor",
            GateKind::Mux => "mux",
        }
    }
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "and" => Ok(GateKind::And),
            "or" => Ok(GateKind::Or),
            "xor" => Ok(GateKind::Xor),
            "mux" => Ok(GateKind::Mux),
            other => Err(format!(
                "unknown gate {other:?} (expected and, or, xor, or mux)"
            )),
        }
    }
}

/// Applies a two-input gate cycle by cycle.
///
/// MUX is not a two-input gate; pass its select through [`gate_mux`].
pub fn gate_apply(kind: GateKind, a: &BitStream, b: &BitStream) -> Result<BitStream> {
    match kind {
        GateKind::And => a.and(b),
        GateKind::Or => a.or(b),
        GateKind::Xor => a.xor(b),
        GateKind::Mux => Err(Error::MuxNeedsSelect),
    }
}

/// Multiplexes `a` and `b` under a half-rate select.
///
/// The select runs at half the input bit rate: it must hold `ceil(n / 2)`
/// bits, and each one is held for two input cycles (the last held bit
/// covers the odd final cycle when `n` is odd). Output cycle `t` is `b_t`
/// where the held bit is 1 and `a_t` where it is 0.
pub fn gate_mux(a: &BitStream, b: &BitStream, select: &BitStream) -> Result<BitStream> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    let expected = n.div_ceil(2);
    if select.len() != expected {
        return Err(Error::SelectLength {
            inputs: n,
            expected,
            got: select.len(),
        });
    }
    BitStream::from_fn(n, |t| {
        if select.get(t / 2) {
            b.get(t)
        } else {
            a.get(t)
        }
    })
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Closed-form output probability for `kind` on inputs of values `pa`, `pb`
/// generated under `mode`.
///
/// For MUX, `mode` describes the select's relation to the inputs: only an
/// uncorrelated select has a closed form, `(1 - ps) pa + ps pb`, and `ps`
/// is required.
pub fn oracle(
    kind: GateKind,
    mode: CorrelationMode,
    pa: f64,
    pb: f64,
    ps: Option<f64>,
) -> Result<f64> {
    check_probability(pa)?;
    check_probability(pb)?;
    if let Some(ps) = ps {
        check_probability(ps)?;
    }
    use CorrelationMode::*;
    use GateKind::*;
    Ok(match (kind, mode) {
        (And, Uncorrelated) => pa * pb,
        (And, Positive) => pa.min(pb),
        (And, Negative) => (pa + pb - 1.0).max(0.0),
        (Or, Uncorrelated) => pa + pb - pa * pb,
        (Or, Positive) => pa.max(pb),
        (Or, Negative) => (pa + pb).min(1.0),
        (Xor, Uncorrelated) => pa + pb - 2.0 * pa * pb,
        (Xor, Positive) => (pa - pb).abs(),
        (Xor, Negative) => {
            let sum = pa + pb;
            if sum <= 1.0 {
                sum
            } else {
                2.0 - sum
            }
        }
        (Mux, Uncorrelated) => {
            let ps = ps.ok_or(Error::MissingSelectProbability)?;
            (1.0 - ps) * pa + ps * pb
        }
        (Mux, Positive) | (Mux, Negative) => return Err(Error::CorrelatedMuxSelect),
    })
}

/// One seeded measurement of a gate against its closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub gate: GateKind,
    pub mode: CorrelationMode,
    pub pa: f64,
    pub pb: f64,
    pub ps: Option<f64>,
    pub n: usize,
    pub predicted: f64,
    pub measured: f64,
    pub abs_error: f64,
}

/// Generates an input pair under `mode`, applies the gate, and compares the
/// decoded output to [`oracle`].
///
/// MUX is verified with an independent select at `ps = 0.5`; use
/// [`verify_mux`] to choose the select probability.
pub fn verify_gate(
    kind: GateKind,
    mode: CorrelationMode,
    pa: f64,
    pb: f64,
    n: usize,
    src: &EntropySource,
) -> Result<VerificationReport> {
    if kind == GateKind::Mux {
        if mode != CorrelationMode::Uncorrelated {
            return Err(Error::CorrelatedMuxSelect);
        }
        return verify_mux(pa, pb, 0.5, n, src);
    }
    let predicted = oracle(kind, mode, pa, pb, None)?;
    let (a, b) = encode_pair(pa, pb, n, mode, &src.substream("inputs"))?;
    let measured = gate_apply(kind, &a, &b)?.value();
    Ok(VerificationReport {
        gate: kind,
        mode,
        pa,
        pb,
        ps: None,
        n,
        predicted,
        measured,
        abs_error: (predicted - measured).abs(),
    })
}

/// Measures the MUX weighted mean: uncorrelated inputs, independent
/// half-rate select of value `ps`.
pub fn verify_mux(
    pa: f64,
    pb: f64,
    ps: f64,
    n: usize,
    src: &EntropySource,
) -> Result<VerificationReport> {
    let predicted = oracle(
        GateKind::Mux,
        CorrelationMode::Uncorrelated,
        pa,
        pb,
        Some(ps),
    )?;
    let (a, b) = encode_pair(
        pa,
        pb,
        n,
        CorrelationMode::Uncorrelated,
        &src.substream("inputs"),
    )?;
    let select = encode(ps, n.div_ceil(2), &src.substream("select"))?;
    let measured = gate_mux(&a, &b, &select)?.value();
    Ok(VerificationReport {
        gate: GateKind::Mux,
        mode: CorrelationMode::Uncorrelated,
        pa,
        pb,
        ps: Some(ps),
        n,
        predicted,
        measured,
        abs_error: (predicted - measured).abs(),
    })
}
