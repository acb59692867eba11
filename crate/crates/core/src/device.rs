//! Memristor stochastic-number-encoder model.
//!
//! The encoder compares an input voltage against a fluctuating internal
//! threshold, so the probability of emitting a 1 follows a sigmoid in the
//! drive voltage. Three fitted curves describe the device:
//!
//! * `p_uncorrelated(v_in)`: probability of a 1 when pulsing at `v_in`;
//! * `p_negative(v_ref)` / `p_positive(v_ref)`: complementary comparator
//!   outputs as a function of the reference voltage.
//!
//! The comparator curves are consistent with the memristor's internal
//! voltage following a logistic law with location `v0_ref` and scale
//! `1 / k_ref`; [`sne_sample_pair`] samples that law once per cycle and
//! thresholds it twice, which is what makes the two output streams
//! positively correlated.
//!
//! The switching threshold itself drifts cycle to cycle as a mean-reverting
//! diffusion `dV = theta (mu - V) dt + sigma dW`. [`ou_step`] advances it
//! by whole cycles using the exact conditional law of that process; see the
//! note on the function.

use crate::bitstream::BitStream;
use crate::entropy::EntropySource;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Fitted device constants: threshold-drift diffusion parameters and
/// switching-voltage statistics.
///
/// `vth_mean`/`vth_std` come from DC sweeps and `mu` from pulsed cycling;
/// the two drive regimes give different centers and both are kept as
/// measured. `vhold_*` and the resistance pair describe switching behavior
/// that plays no role in encoding but rounds out the device description.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemristorParams {
    /// Mean-reversion rate of the threshold drift, per cycle.
    pub theta: f64,
    /// Long-run mean of the drifting threshold, volts.
    pub mu: f64,
    /// Diffusion amplitude, volts per root cycle.
    pub sigma: f64,
    /// DC-sweep switching threshold mean, volts.
    pub vth_mean: f64,
    /// DC-sweep switching threshold spread, volts.
    pub vth_std: f64,
    /// Hold-voltage mean, volts.
    pub vhold_mean: f64,
    /// Hold-voltage spread, volts.
    pub vhold_std: f64,
    /// On-state resistance, ohms.
    pub r_on: f64,
    /// Off-state resistance, ohms.
    pub r_off: f64,
}

impl Default for MemristorParams {
    fn default() -> Self {
        MemristorParams {
            theta: 0.306,
            mu: 0.729,
            sigma: 0.284,
            vth_mean: 0.78,
            vth_std: 0.39,
            vhold_mean: 0.23,
            vhold_std: 0.18,
            r_on: 1.0e3,
            r_off: 1.0e8,
        }
    }
}

impl MemristorParams {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, &'static str, f64, bool); 6] = [
            (
                "theta",
                "positive and finite",
                self.theta,
                self.theta > 0.0 && self.theta.is_finite(),
            ),
            (
                "sigma",
                "non-negative and finite",
                self.sigma,
                self.sigma >= 0.0 && self.sigma.is_finite(),
            ),
            ("mu", "finite", self.mu, self.mu.is_finite()),
            ("vth_std", "non-negative", self.vth_std, self.vth_std >= 0.0),
            (
                "vhold_std",
                "non-negative",
                self.vhold_std,
                self.vhold_std >= 0.0,
            ),
            ("r_on", "positive", self.r_on, self.r_on > 0.0),
        ];
        for (name, requirement, value, ok) in checks {
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    requirement,
                    value,
                });
            }
        }
        if self.r_off <= self.r_on {
            return Err(Error::InvalidParameter {
                name: "r_off",
                requirement: "greater than r_on",
                value: self.r_off,
            });
        }
        Ok(())
    }

    /// Standard deviation of the threshold drift's stationary law,
    /// `sigma / sqrt(2 theta)`.
    pub fn stationary_std(&self) -> f64 {
        self.sigma / (2.0 * self.theta).sqrt()
    }

    pub fn from_toml_str(text: &str) -> Result<MemristorParams> {
        let params: MemristorParams = toml::from_str(text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        params.validate()?;
        Ok(params)
    }
}

/// Fitted sigmoid transfer constants for the two encoder configurations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SneTransfer {
    /// Slope of the pulsed-input curve, per volt.
    pub k_in: f64,
    /// Midpoint of the pulsed-input curve, volts.
    pub v0_in: f64,
    /// Slope of the comparator curve, per volt.
    pub k_ref: f64,
    /// Midpoint of the comparator curve, volts.
    pub v0_ref: f64,
}

impl Default for SneTransfer {
    fn default() -> Self {
        SneTransfer {
            k_in: 38.9,
            v0_in: 1.34,
            k_ref: 63.1,
            v0_ref: 0.19,
        }
    }
}

impl SneTransfer {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("k_in", self.k_in), ("k_ref", self.k_ref)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    requirement: "positive and finite",
                    value,
                });
            }
        }
        for (name, value) in [("v0_in", self.v0_in), ("v0_ref", self.v0_ref)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    requirement: "finite",
                    value,
                });
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<SneTransfer> {
        let t: SneTransfer = toml::from_str(text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        t.validate()?;
        Ok(t)
    }
}

/// Probability of a 1 when the encoder is pulsed at `v_in`.
pub fn p_uncorrelated(v_in: f64, t: &SneTransfer) -> f64 {
    sigmoid(t.k_in * (v_in - t.v0_in))
}

/// Drive voltage that makes the encoder emit 1s with probability `p`.
///
/// Exact inverse of [`p_uncorrelated`]; `p` must lie strictly inside
/// `(0, 1)` since the sigmoid only reaches 0 and 1 in the limit.
pub fn v_in_for(p: f64, t: &SneTransfer) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::UnreachableTarget(p));
    }
    Ok(t.v0_in + (p / (1.0 - p)).ln() / t.k_in)
}

/// Comparator output probability in the negatively correlated configuration.
pub fn p_negative(v_ref: f64, t: &SneTransfer) -> f64 {
    sigmoid(t.k_ref * (v_ref - t.v0_ref))
}

/// Comparator output probability in the positively correlated
/// configuration; complements [`p_negative`] exactly.
pub fn p_positive(v_ref: f64, t: &SneTransfer) -> f64 {
    1.0 - p_negative(v_ref, t)
}

/// Reference voltage at which [`p_positive`] hits `target`.
pub fn v_ref_for_positive(target: f64, t: &SneTransfer) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::UnreachableTarget(target));
    }
    Ok(t.v0_ref + ((1.0 - target) / target).ln() / t.k_ref)
}

/// A device's drifting threshold voltage at some cycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceState {
    pub vth: f64,
    pub cycle: u64,
}

impl DeviceState {
    /// Starts the threshold at its long-run mean.
    pub fn stationary(params: &MemristorParams) -> DeviceState {
        DeviceState {
            vth: params.mu,
            cycle: 0,
        }
    }
}

/// Advances the threshold by one cycle.
///
/// Uses the exact one-cycle conditional law of the diffusion,
/// `vth' = mu + (vth - mu) e^{-theta} + sigma sqrt((1 - e^{-2 theta}) / (2 theta)) z`,
/// rather than a forward-difference step: at whole-cycle resolution the
/// forward difference inflates the stationary spread by roughly
/// `1/sqrt(1 - theta/2)` (about 9% for the default parameters), while the
/// exact law keeps it at `sigma / sqrt(2 theta)` for every step size.
pub fn ou_step(state: DeviceState, params: &MemristorParams, rng: &mut impl Rng) -> DeviceState {
    let decay = (-params.theta).exp();
    let spread = params.sigma * ((1.0 - decay * decay) / (2.0 * params.theta)).sqrt();
    let z: f64 = rng.sample(StandardNormal);
    DeviceState {
        vth: params.mu + (state.vth - params.mu) * decay + spread * z,
        cycle: state.cycle + 1,
    }
}

/// Threshold trajectory over `steps` cycles, started at the long-run mean.
pub fn ou_trajectory(
    params: &MemristorParams,
    steps: usize,
    src: &EntropySource,
) -> Result<Vec<f64>> {
    params.validate()?;
    let mut rng = src.rng();
    let mut state = DeviceState::stationary(params);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        state = ou_step(state, params, &mut rng);
        out.push(state.vth);
    }
    Ok(out)
}

/// Threshold samples drawn independently from the stationary law, for
/// contrast with the cycle-to-cycle correlated trajectory.
pub fn iid_trajectory(
    params: &MemristorParams,
    steps: usize,
    src: &EntropySource,
) -> Result<Vec<f64>> {
    params.validate()?;
    let spread = params.stationary_std();
    let mut rng = src.rng();
    Ok((0..steps)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            params.mu + spread * z
        })
        .collect())
}

/// Temporal structure of an encoder stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SneMode {
    /// Cycles are exchangeable: iid bits at the sigmoid probability.
    Iid,
    /// The threshold drifts between cycles, leaving the stream temporally
    /// correlated.
    Ou,
}

impl std::str::FromStr for SneMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "iid" => Ok(SneMode::Iid),
            "ou" => Ok(SneMode::Ou),
            other => Err(format!(
                "unknown encoder mode {other:?} (expected iid or ou)"
            )),
        }
    }
}

/// Samples a positively correlated stream pair from the two-comparator
/// encoder.
///
/// One internal voltage is drawn per cycle from the logistic law implied by
/// the comparator curve and thresholded against both references, chosen so
/// the marginals hit the targets. Because the thresholds nest, equal
/// targets give bit-identical streams.
pub fn sne_sample_pair(
    target_pa: f64,
    target_pb: f64,
    n: usize,
    t: &SneTransfer,
    src: &EntropySource,
) -> Result<(BitStream, BitStream)> {
    t.validate()?;
    let v_ref_a = v_ref_for_positive(target_pa, t)?;
    let v_ref_b = v_ref_for_positive(target_pb, t)?;
    if n == 0 {
        return Err(Error::EmptyStream);
    }
    let mut rng = src.rng();
    let mut bits_a = vec![false; n];
    let mut bits_b = vec![false; n];
    for i in 0..n {
        let u = rng.random::<f64>();
        let v_mem = t.v0_ref + (u / (1.0 - u)).ln() / t.k_ref;
        bits_a[i] = v_mem > v_ref_a;
        bits_b[i] = v_mem > v_ref_b;
    }
    Ok((
        BitStream::from_bits(&bits_a)?,
        BitStream::from_bits(&bits_b)?,
    ))
}

/// Samples a single encoder stream driven at `v_in`.
pub fn sne_sample_uncorrelated(
    v_in: f64,
    n: usize,
    params: &MemristorParams,
    t: &SneTransfer,
    mode: SneMode,
    src: &EntropySource,
) -> Result<BitStream> {
    t.validate()?;
    let mut rng = src.rng();
    match mode {
        SneMode::Iid => {
            let p = p_uncorrelated(v_in, t);
            BitStream::from_fn(n, |_| rng.random::<f64>() < p)
        }
        SneMode::Ou => {
            params.validate()?;
            let mut state = DeviceState::stationary(params);
            BitStream::from_fn(n, |_| {
                state = ou_step(state, params, &mut rng);
                v_in > state.vth
            })
        }
    }
}
