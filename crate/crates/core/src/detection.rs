//! Soft detection under ISI, interleaving and diversity combining.
//!
//! The LLR of slot `i` compares two Gaussian mixtures: one per value of the
//! current bit, each averaged uniformly over every pattern of the unknown
//! previous bits. Means and variances follow the Gaussian channel model, so
//! the receiver never needs the true history.

use std::ops::Deref;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::channel::RxFrame;
use crate::diffusion::ChannelResponse;
use crate::{seed, Error, Result, LLR_CLAMP};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Per-coded-bit LLRs; positive favours bit 0. Entries are finite and
/// bounded by `±LLR_CLAMP`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    /// Clamps every entry to `±LLR_CLAMP`; NaN becomes 0.
    pub fn new(values: Vec<f64>) -> Self {
        Self(values.into_iter().map(clamp_llr).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for LlrVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[inline]
pub fn clamp_llr(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-LLR_CLAMP, LLR_CLAMP)
    }
}

/// A bijection on `0..n`; `get(j)` is where position `j` is sent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
    seed: Option<u64>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
            seed: None,
        }
    }

    pub fn reversal(n: usize) -> Self {
        Self {
            map: (0..n).rev().collect(),
            seed: None,
        }
    }

    /// Uniformly random permutation drawn from `seed`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(&mut seed::rng(seed));
        Self {
            map,
            seed: Some(seed),
        }
    }

    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &t in &map {
            if t >= map.len() || std::mem::replace(&mut seen[t], true) {
                return Err(Error::Contract(format!("map is not a bijection (entry {t})")));
            }
        }
        Ok(Self { map, seed: None })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn get(&self, j: usize) -> usize {
        self.map[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (j, &t) in self.map.iter().enumerate() {
            inv[t] = j;
        }
        Self {
            map: inv,
            seed: None,
        }
    }
}

/// `out[perm(j)] = bits[j]`.
pub fn interleave(bits: &[u8], perm: &Permutation) -> Result<Vec<u8>> {
    Error::check_len("interleave input", perm.len(), bits.len())?;
    let mut out = vec![0; bits.len()];
    for (j, &b) in bits.iter().enumerate() {
        out[perm.get(j)] = b;
    }
    Ok(out)
}

/// `out[j] = llr[perm(j)]`: brings interleaved-order LLRs back to codeword order.
pub fn deinterleave_llr(llr: &LlrVector, perm: &Permutation) -> Result<LlrVector> {
    Error::check_len("deinterleave input", perm.len(), llr.len())?;
    Ok(LlrVector((0..llr.len()).map(|j| llr[perm.get(j)]).collect()))
}

/// Equal-weight combining `(a + b) / 2`, clamped.
pub fn combine_llrs(a: &LlrVector, b: &LlrVector) -> Result<LlrVector> {
    Error::check_len("combine input", a.len(), b.len())?;
    Ok(LlrVector(
        a.iter().zip(b.iter()).map(|(x, y)| clamp_llr(0.5 * (x + y))).collect(),
    ))
}

/// Fixed-threshold OOK decision: bit 1 iff `count >= threshold`.
pub fn hard_detect(rx: &RxFrame, threshold: f64) -> Result<Vec<u8>> {
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(Error::invalid("threshold", "must be finite and >= 0"));
    }
    Ok(rx.counts.iter().map(|&c| (c >= threshold) as u8).collect())
}

/// What the receiver observes per slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SignalModel {
    /// One molecule type, bit 1 releases `M`.
    #[default]
    OnOff,
    /// Pre-equalised difference: information stream minus an anti stream
    /// releasing `beta * M` for every bit 0.
    Differential { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetectorConfig {
    /// Previous bits marginalised; `None` uses the channel memory `L`.
    pub hypothesis_bits: Option<usize>,
    pub model: SignalModel,
}

/// Variance floor `max(1, 1e-3 * M * P1)`.
pub fn variance_floor(molecules: f64, p1: f64) -> f64 {
    (1e-3 * molecules * p1).max(1.0)
}

/// LLRs under the on/off model with the full channel memory.
pub fn compute_llrs(rx: &RxFrame, molecules: f64, response: &ChannelResponse) -> Result<LlrVector> {
    compute_llrs_with(rx, molecules, response, &DetectorConfig::default())
}

pub fn compute_llrs_with(
    rx: &RxFrame,
    molecules: f64,
    response: &ChannelResponse,
    config: &DetectorConfig,
) -> Result<LlrVector> {
    if rx.counts.is_empty() {
        return Err(Error::invalid("rx", "frame must be non-empty"));
    }
    let detector = MixtureDetector::new(molecules, response, config)?;
    Ok(detector.llrs(&rx.counts))
}

/// One Gaussian hypothesis: `log f(x) = log_norm - (x - mean)^2 * half_inv_var`.
#[derive(Debug, Clone, Copy)]
struct Component {
    mean: f64,
    half_inv_var: f64,
    log_norm: f64,
}

impl Component {
    fn new(mean: f64, var: f64) -> Self {
        Self {
            mean,
            half_inv_var: 0.5 / var,
            log_norm: -0.5 * (LN_2PI + var.ln()),
        }
    }

    #[inline]
    fn log_density(&self, x: f64) -> f64 {
        let d = x - self.mean;
        self.log_norm - d * d * self.half_inv_var
    }
}

/// Precomputed mixture components per history depth. Depth `d` (the number
/// of previous bits available) is `min(hypothesis_bits, i)` at slot `i`.
#[derive(Debug, Clone)]
pub struct MixtureDetector {
    silent: bool,
    hypothesis_bits: usize,
    /// `[depth][current bit]` -> `2^depth` components.
    tables: Vec<[Vec<Component>; 2]>,
}

impl MixtureDetector {
    pub fn new(molecules: f64, response: &ChannelResponse, config: &DetectorConfig) -> Result<Self> {
        if !(molecules.is_finite() && molecules >= 0.0) {
            return Err(Error::invalid("molecules", "must be finite and >= 0"));
        }
        let memory = response.memory();
        let hypothesis_bits = config.hypothesis_bits.unwrap_or(memory);
        if hypothesis_bits > memory {
            return Err(Error::invalid(
                "hypothesis_bits",
                format!("must not exceed the channel memory {memory}"),
            ));
        }
        let beta = match config.model {
            SignalModel::OnOff => 0.0,
            SignalModel::Differential { beta } => {
                if !(0.0..=1.0).contains(&beta) {
                    return Err(Error::invalid("beta", "must lie in [0, 1]"));
                }
                beta
            }
        };
        let taps = response.taps();
        let floor = variance_floor(molecules, taps[0]);
        // (mean, variance) contributed by one slot carrying bit b at tap p
        let term = |bit: usize, p: f64| -> (f64, f64) {
            let v = p * (1.0 - p);
            if bit == 1 {
                (molecules * p, molecules * v)
            } else {
                (-beta * molecules * p, beta * molecules * v)
            }
        };

        let tables = (0..=hypothesis_bits)
            .map(|depth| {
                let build = |current: usize| -> Vec<Component> {
                    (0..1usize << depth)
                        .map(|pattern| {
                            let (mut mean, mut var) = term(current, taps[0]);
                            for l in 1..=depth {
                                let (m, v) = term((pattern >> (l - 1)) & 1, taps[l]);
                                mean += m;
                                var += v;
                            }
                            Component::new(mean, var.max(floor))
                        })
                        .collect()
                };
                [build(0), build(1)]
            })
            .collect();
        Ok(Self {
            silent: molecules == 0.0,
            hypothesis_bits,
            tables,
        })
    }

    pub fn hypothesis_bits(&self) -> usize {
        self.hypothesis_bits
    }

    /// LLR of a single slot given how many previous slots exist.
    pub fn llr_at(&self, count: f64, available_history: usize) -> f64 {
        if self.silent {
            return 0.0;
        }
        let depth = available_history.min(self.hypothesis_bits);
        let [zero, one] = &self.tables[depth];
        clamp_llr(log_sum_exp(zero, count) - log_sum_exp(one, count))
    }

    pub fn llrs(&self, counts: &[f64]) -> LlrVector {
        LlrVector(
            counts
                .iter()
                .enumerate()
                .map(|(i, &x)| self.llr_at(x, i))
                .collect(),
        )
    }
}

/// `log sum_j exp(log f_j(x))` with the maximum factored out.
fn log_sum_exp(components: &[Component], x: f64) -> f64 {
    let max = components
        .iter()
        .map(|c| c.log_density(x))
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = components
        .iter()
        .map(|c| (c.log_density(x) - max).exp())
        .sum();
    max + sum.ln()
}
