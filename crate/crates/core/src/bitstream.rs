//! Unipolar stochastic bit streams.
//!
//! A stream of `n` bits encodes the value `ones / n`, so all arithmetic on
//! streams is arithmetic on probabilities. Streams are packed 64 bits per
//! word; logical bit `i` lives in word `i / 64` at bit `i % 64`.
//!
//! [`encode_pair`] is the correlation-control primitive. Both streams of a
//! pair compare the *same* uniform draw against their own probability:
//! sharing the draw makes the indicator events nested (maximal overlap),
//! and inverting it for one side makes them maximally exclusive. Which
//! stream in a pair is longer-valued does not matter; the construction is
//! symmetric in the probabilities.

use crate::entropy::EntropySource;
use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Correlation imposed on a generated stream pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    /// Independent draws per stream.
    Uncorrelated,
    /// Shared draw; overlap is maximal and the pair's cross-correlation
    /// approaches +1.
    Positive,
    /// Shared draw, inverted for the second stream; overlap is minimal and
    /// the cross-correlation approaches -1.
    Negative,
}

impl CorrelationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CorrelationMode::Uncorrelated => "uncorrelated",
            CorrelationMode::Positive => "positive",
            CorrelationMode::Negative => "negative",
        }
    }
}

impl std::fmt::Display for CorrelationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CorrelationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uncorrelated" => Ok(CorrelationMode::Uncorrelated),
            "positive" => Ok(CorrelationMode::Positive),
            "negative" => Ok(CorrelationMode::Negative),
            other => Err(format!(
                "unknown correlation mode {other:?} (expected uncorrelated, positive, or negative)"
            )),
        }
    }
}

/// A fixed-length stream of bits, packed least-significant-bit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitStream {
    words: Vec<u64>,
    len: usize,
}

impl BitStream {
    fn zeroed(len: usize) -> Result<BitStream> {
        if len == 0 {
            return Err(Error::EmptyStream);
        }
        Ok(BitStream {
            words: vec![0; len.div_ceil(64)],
            len,
        })
    }

    /// Builds a stream by evaluating `f` once per position, in order.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Result<BitStream> {
        let mut s = BitStream::zeroed(len)?;
        for i in 0..len {
            if f(i) {
                s.words[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(s)
    }

    pub fn from_bits(bits: &[bool]) -> Result<BitStream> {
        BitStream::from_fn(bits.len(), |i| bits[i])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Streams are never empty; this exists for container-like symmetry.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// The encoded value: fraction of set bits, always in `[0, 1]`.
    pub fn value(&self) -> f64 {
        self.ones() as f64 / self.len as f64
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Clears any bits above `len` in the last word. Word-wise operations
    /// that can set tail bits (complement, OR with a mask) call this so that
    /// `ones` stays exact.
    fn mask_tail(&mut self) {
        let used = self.len % 64;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }

    fn check_len(&self, other: &BitStream) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    fn zip_words(&self, other: &BitStream, op: impl Fn(u64, u64) -> u64) -> BitStream {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        let mut out = BitStream {
            words,
            len: self.len,
        };
        out.mask_tail();
        out
    }

    pub fn and(&self, other: &BitStream) -> Result<BitStream> {
        self.check_len(other)?;
        Ok(self.zip_words(other, |a, b| a & b))
    }

    pub fn or(&self, other: &BitStream) -> Result<BitStream> {
        self.check_len(other)?;
        Ok(self.zip_words(other, |a, b| a | b))
    }

    pub fn xor(&self, other: &BitStream) -> Result<BitStream> {
        self.check_len(other)?;
        Ok(self.zip_words(other, |a, b| a ^ b))
    }

    pub fn complement(&self) -> BitStream {
        let mut out = BitStream {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.mask_tail();
        out
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Draws an `n`-bit stream whose expected value is `p`.
pub fn encode(p: f64, n: usize, src: &EntropySource) -> Result<BitStream> {
    check_probability(p)?;
    let mut rng = src.rng();
    BitStream::from_fn(n, |_| rng.random::<f64>() < p)
}

/// Draws a stream pair with the requested correlation between them.
///
/// Per cycle one uniform `u` is drawn (plus a second for the uncorrelated
/// case) and each stream compares it against its own probability:
///
/// * uncorrelated: `a = [u1 < pa]`, `b = [u2 < pb]`
/// * positive: `a = [u < pa]`, `b = [u < pb]`
/// * negative: `a = [u < pa]`, `b = [1 - u < pb]`
///
/// Equal probabilities under positive correlation therefore produce
/// *identical* streams, which is what lets a downstream XOR compute an
/// exact-in-expectation absolute difference.
pub fn encode_pair(
    pa: f64,
    pb: f64,
    n: usize,
    mode: CorrelationMode,
    src: &EntropySource,
) -> Result<(BitStream, BitStream)> {
    check_probability(pa)?;
    check_probability(pb)?;
    if n == 0 {
        return Err(Error::EmptyStream);
    }
    let mut rng = src.rng();
    let mut a = BitStream::zeroed(n)?;
    let mut b = BitStream::zeroed(n)?;
    for i in 0..n {
        let u = rng.random::<f64>();
        let (bit_a, bit_b) = match mode {
            CorrelationMode::Uncorrelated => (u < pa, rng.random::<f64>() < pb),
            CorrelationMode::Positive => (u < pa, u < pb),
            CorrelationMode::Negative => (u < pa, 1.0 - u < pb),
        };
        if bit_a {
            a.words[i / 64] |= 1 << (i % 64);
        }
        if bit_b {
            b.words[i / 64] |= 1 << (i % 64);
        }
    }
    Ok((a, b))
}

/// Stochastic cross-correlation of two equal-length streams, in `[-1, 1]`.
///
/// The covariance `p_ab - p_a * p_b` is normalized by its extreme value of
/// the matching sign, so +1 means "as overlapped as the marginals allow"
/// and -1 "as disjoint as they allow". When the marginals leave no freedom
/// (either value is 0 or 1) the statistic is defined as 0.
pub fn scc(a: &BitStream, b: &BitStream) -> Result<f64> {
    a.check_len(b)?;
    let n = a.len() as f64;
    let pa = a.value();
    let pb = b.value();
    let p_ab = a.and(b)?.ones() as f64 / n;
    let cov = p_ab - pa * pb;
    let denom = if cov > 0.0 {
        pa.min(pb) - pa * pb
    } else {
        pa * pb - (pa + pb - 1.0).max(0.0)
    };
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok(cov / denom)
}

/// How bit flips are distributed over a stream (or stream pair).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipMode {
    /// Each bit of each stream flips independently with the given rate.
    IndependentPerBit,
    /// One flip mask is drawn and applied to both streams of a pair, the
    /// regime where paired streams see the same disturbance. An XOR of the
    /// pair cancels such flips exactly.
    SharedMaskPerPair,
    /// Exactly `floor(rate * n)` distinct positions flip in each stream.
    ExactCount,
}

impl FlipMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FlipMode::IndependentPerBit => "independent",
            FlipMode::SharedMaskPerPair => "shared-mask",
            FlipMode::ExactCount => "exact-count",
        }
    }
}

impl std::fmt::Display for FlipMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FlipMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "independent" => Ok(FlipMode::IndependentPerBit),
            "shared-mask" => Ok(FlipMode::SharedMaskPerPair),
            "exact-count" => Ok(FlipMode::ExactCount),
            other => Err(format!(
                "unknown flip mode {other:?} (expected independent, shared-mask, or exact-count)"
            )),
        }
    }
}

/// A validated flip request: mode plus a rate in `[0, 0.5]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipSpec {
    mode: FlipMode,
    rate: f64,
}

impl FlipSpec {
    pub fn new(mode: FlipMode, rate: f64) -> Result<FlipSpec> {
        if !(0.0..=0.5).contains(&rate) || rate.is_nan() {
            return Err(Error::InvalidFlipRate(rate));
        }
        Ok(FlipSpec { mode, rate })
    }

    pub fn mode(&self) -> FlipMode {
        self.mode
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

fn bernoulli_mask(rate: f64, n: usize, rng: &mut impl Rng) -> BitStream {
    BitStream::from_fn(n, |_| rng.random::<f64>() < rate).expect("n checked by caller")
}

fn exact_count_mask(rate: f64, n: usize, rng: &mut impl Rng) -> BitStream {
    let count = (rate * n as f64).floor() as usize;
    let mut mask = BitStream::zeroed(n).expect("n checked by caller");
    for i in rand::seq::index::sample(rng, n, count) {
        mask.words[i / 64] |= 1 << (i % 64);
    }
    mask
}

/// Flips bits of a single stream according to `spec`.
///
/// [`FlipMode::SharedMaskPerPair`] is rejected here: a shared mask is only
/// meaningful across a pair.
pub fn inject_flips(s: &BitStream, spec: &FlipSpec, src: &EntropySource) -> Result<BitStream> {
    let mut rng = src.rng();
    let mask = match spec.mode {
        FlipMode::IndependentPerBit => bernoulli_mask(spec.rate, s.len(), &mut rng),
        FlipMode::SharedMaskPerPair => return Err(Error::SharedMaskNeedsPair),
        FlipMode::ExactCount => exact_count_mask(spec.rate, s.len(), &mut rng),
    };
    s.xor(&mask)
}

/// Flips bits of a stream pair according to `spec`.
pub fn inject_flips_pair(
    a: &BitStream,
    b: &BitStream,
    spec: &FlipSpec,
    src: &EntropySource,
) -> Result<(BitStream, BitStream)> {
    a.check_len(b)?;
    let mut rng = src.rng();
    let n = a.len();
    let (mask_a, mask_b) = match spec.mode {
        FlipMode::IndependentPerBit => {
            let ma = bernoulli_mask(spec.rate, n, &mut rng);
            let mb = bernoulli_mask(spec.rate, n, &mut rng);
            (ma, mb)
        }
        FlipMode::SharedMaskPerPair => {
            let m = bernoulli_mask(spec.rate, n, &mut rng);
            (m.clone(), m)
        }
        FlipMode::ExactCount => {
            let ma = exact_count_mask(spec.rate, n, &mut rng);
            let mb = exact_count_mask(spec.rate, n, &mut rng);
            (ma, mb)
        }
    };
    Ok((a.xor(&mask_a)?, b.xor(&mask_b)?))
}
