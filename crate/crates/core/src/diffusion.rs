//! Brownian-motion characterisation of the point-transmitter / absorbing-sphere link.
//!
//! The receiver is a sphere of radius `rr` centred at the origin; the
//! transmitter sits at `(0, 0, r0)`. Released particles take Gaussian steps
//! of variance `2 D dt` per coordinate and are removed the first time they
//! reach the sphere. Per-slot absorption counts divided by the number of
//! released particles give the channel response (P-vector).

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{seed, Error, Result};

/// Memory retained by the ISI model unless configured otherwise, in seconds.
pub const DEFAULT_MEMORY_DURATION: f64 = 1.4;

const MULTIPLE_TOL: f64 = 1e-9;

/// Physical constants of the diffusion link. Lengths in µm, times in s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub total_time: f64,
    pub diffusion_coeff: f64,
    pub tx_distance: f64,
    pub receiver_radius: f64,
    pub n_particles: u64,
    pub sim_step: f64,
    pub slot_width: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            total_time: 2.1,
            diffusion_coeff: 79.4,
            tx_distance: 10.0,
            receiver_radius: 5.0,
            n_particles: 1_000_000,
            sim_step: 1e-4,
            slot_width: 0.150,
        }
    }
}

fn integer_ratio(num: f64, den: f64) -> Option<usize> {
    let ratio = num / den;
    let rounded = ratio.round();
    if rounded >= 1.0 && (ratio - rounded).abs() <= MULTIPLE_TOL * rounded.max(1.0) {
        Some(rounded as usize)
    } else {
        None
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.total_time) {
            return Err(Error::invalid("total_time", "must be finite and > 0"));
        }
        if !(self.diffusion_coeff.is_finite() && self.diffusion_coeff >= 0.0) {
            return Err(Error::invalid("diffusion_coeff", "must be finite and >= 0"));
        }
        if !finite_pos(self.sim_step) {
            return Err(Error::invalid("sim_step", "must be finite and > 0"));
        }
        if !finite_pos(self.slot_width) {
            return Err(Error::invalid("slot_width", "must be finite and > 0"));
        }
        if !finite_pos(self.receiver_radius) {
            return Err(Error::invalid("receiver_radius", "must be finite and > 0"));
        }
        if !(self.tx_distance.is_finite() && self.tx_distance > self.receiver_radius) {
            return Err(Error::invalid(
                "tx_distance",
                "transmitter must lie strictly outside the receiver (r0 > rr)",
            ));
        }
        if integer_ratio(self.slot_width, self.sim_step).is_none() {
            return Err(Error::invalid(
                "slot_width",
                "must be an integer multiple of sim_step",
            ));
        }
        if integer_ratio(self.total_time, self.slot_width).is_none() {
            return Err(Error::invalid(
                "total_time",
                "must be an integer multiple of slot_width",
            ));
        }
        Ok(())
    }

    /// Number of slots `T / Ts`.
    pub fn n_slots(&self) -> usize {
        integer_ratio(self.total_time, self.slot_width).unwrap_or(0)
    }

    /// Simulation steps per slot `Ts / dt`.
    pub fn steps_per_slot(&self) -> usize {
        integer_ratio(self.slot_width, self.sim_step).unwrap_or(0)
    }

    /// Channel memory in slots for a retained duration, `round(duration / Ts)`,
    /// limited to `[1, n_slots - 1]`.
    pub fn memory_for(&self, duration: f64) -> usize {
        memory_for(duration, self.slot_width, self.n_slots())
    }
}

fn memory_for(duration: f64, slot_width: f64, n_slots: usize) -> usize {
    let raw = (duration / slot_width).round() as usize;
    raw.clamp(1, n_slots.saturating_sub(1).max(1))
}

/// Per-slot hit probabilities `P1..Pm` with the ISI memory used downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelResponse {
    p: Vec<f64>,
    slot_width: f64,
    memory: usize,
}

impl ChannelResponse {
    pub fn new(p: Vec<f64>, slot_width: f64, memory: usize) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::invalid("p", "needs at least two slots"));
        }
        if let Some(bad) = p.iter().find(|v| !(v.is_finite() && (0.0..=1.0).contains(*v))) {
            return Err(Error::invalid("p", format!("entry {bad} outside [0, 1]")));
        }
        let total: f64 = p.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::invalid("p", format!("entries sum to {total} > 1")));
        }
        if !(slot_width.is_finite() && slot_width > 0.0) {
            return Err(Error::invalid("slot_width", "must be finite and > 0"));
        }
        if memory < 1 || memory > p.len() - 1 {
            return Err(Error::invalid(
                "memory",
                format!("must lie in [1, {}], got {memory}", p.len() - 1),
            ));
        }
        Ok(Self {
            p,
            slot_width,
            memory,
        })
    }

    /// Builds a response whose memory is derived from a retained duration.
    pub fn with_memory_duration(p: Vec<f64>, slot_width: f64, duration: f64) -> Result<Self> {
        let memory = memory_for(duration, slot_width, p.len());
        Self::new(p, slot_width, memory)
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn slot_width(&self) -> f64 {
        self.slot_width
    }

    /// Number of previous slots whose taps are kept (L).
    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Taps `P1..P_{L+1}`: the current-bit tap followed by `L` ISI taps.
    pub fn taps(&self) -> &[f64] {
        &self.p[..=self.memory]
    }

    pub fn set_memory(&mut self, memory: usize) -> Result<()> {
        *self = Self::new(std::mem::take(&mut self.p), self.slot_width, memory)?;
        Ok(())
    }
}

/// How absorption is detected between simulation steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCheck {
    /// Only the end-of-step position is tested against the sphere.
    EndOfStep,
    /// End-of-step test plus the Brownian-bridge probability of having
    /// touched the sphere during the step (locally planar boundary).
    #[default]
    BrownianBridge,
}

/// Particle simulation of the channel response with the default boundary check.
pub fn simulate_channel_response(params: &ChannelParams, seed: u64) -> Result<ChannelResponse> {
    simulate_channel_response_with(params, seed, BoundaryCheck::default())
}

pub fn simulate_channel_response_with(
    params: &ChannelParams,
    seed: u64,
    boundary: BoundaryCheck,
) -> Result<ChannelResponse> {
    let counts = absorption_counts(params, seed, boundary)?;
    let n = params.n_particles as f64;
    let p = counts.into_iter().map(|c| c as f64 / n).collect();
    ChannelResponse::with_memory_duration(p, params.slot_width, DEFAULT_MEMORY_DURATION)
}

/// Raw per-slot absorption tallies. Particle `i` draws from its own stream
/// keyed by `(seed, i)`, so the result is independent of worker count.
pub fn absorption_counts(
    params: &ChannelParams,
    seed: u64,
    boundary: BoundaryCheck,
) -> Result<Vec<u64>> {
    params.validate()?;
    if params.n_particles == 0 {
        return Err(Error::invalid(
            "n_particles",
            "at least one particle is needed to normalise the response",
        ));
    }
    let walker = Walker::new(params, boundary);
    let n_slots = walker.n_slots;

    let tally = |mut acc: Vec<u64>, index: u64| {
        if let Some(slot) = walker.first_passage_slot(seed, index) {
            acc[slot] += 1;
        }
        acc
    };

    #[cfg(feature = "parallel")]
    let counts = {
        use rayon::prelude::*;
        (0..params.n_particles)
            .into_par_iter()
            .fold(|| vec![0u64; n_slots], tally)
            .reduce(
                || vec![0u64; n_slots],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    };
    #[cfg(not(feature = "parallel"))]
    let counts = (0..params.n_particles).fold(vec![0u64; n_slots], tally);

    Ok(counts)
}

struct Walker {
    sigma: f64,
    d_dt: f64,
    r0: f64,
    rr: f64,
    rr2: f64,
    n_slots: usize,
    steps_per_slot: usize,
    boundary: BoundaryCheck,
}

impl Walker {
    fn new(params: &ChannelParams, boundary: BoundaryCheck) -> Self {
        let d_dt = params.diffusion_coeff * params.sim_step;
        Self {
            sigma: (2.0 * d_dt).sqrt(),
            d_dt,
            r0: params.tx_distance,
            rr: params.receiver_radius,
            rr2: params.receiver_radius * params.receiver_radius,
            n_slots: params.n_slots(),
            steps_per_slot: params.steps_per_slot(),
            boundary,
        }
    }

    fn first_passage_slot(&self, seed: u64, index: u64) -> Option<usize> {
        if self.sigma == 0.0 {
            return None;
        }
        let mut rng = seed::rng(seed);
        rng.set_stream(index);
        let (mut x, mut y, mut z) = (0.0f64, 0.0f64, self.r0);
        let mut prev_gap = self.r0 - self.rr;
        for slot in 0..self.n_slots {
            for _ in 0..self.steps_per_slot {
                x += self.sigma * rng.sample::<f64, _>(StandardNormal);
                y += self.sigma * rng.sample::<f64, _>(StandardNormal);
                z += self.sigma * rng.sample::<f64, _>(StandardNormal);
                let r2 = x * x + y * y + z * z;
                if r2 <= self.rr2 {
                    return Some(slot);
                }
                if self.boundary == BoundaryCheck::BrownianBridge {
                    let gap = r2.sqrt() - self.rr;
                    // P(bridge touches a plane) = exp(-2 d0 d1 / (2 D dt))
                    let exponent = prev_gap * gap / self.d_dt;
                    if exponent < 40.0 && rng.random::<f64>() < (-exponent).exp() {
                        return Some(slot);
                    }
                    prev_gap = gap;
                }
            }
        }
        None
    }
}

/// Closed-form first-passage CDF for a point source at distance `r0` from
/// the centre of a perfectly absorbing sphere:
/// `F(t) = (rr / r0) * erfc((r0 - rr) / (2 sqrt(D t)))`.
pub fn analytical_hitting_cdf(params: &ChannelParams, t: f64) -> Result<f64> {
    params.validate()?;
    if !(t >= 0.0) {
        return Err(Error::invalid("t", "time must be >= 0"));
    }
    Ok(hitting_cdf(
        params.diffusion_coeff,
        params.tx_distance,
        params.receiver_radius,
        t,
    ))
}

fn hitting_cdf(d: f64, r0: f64, rr: f64, t: f64) -> f64 {
    if t == 0.0 || d == 0.0 {
        return 0.0;
    }
    if t.is_infinite() {
        return rr / r0;
    }
    rr / r0 * libm::erfc((r0 - rr) / (2.0 * (d * t).sqrt()))
}

/// Converts cumulative hit probabilities sampled at `Ts, 2Ts, ...` into
/// per-slot increments (with `F(0) = 0`).
pub fn cumulative_to_slots(cdf_values: &[f64]) -> Result<Vec<f64>> {
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(cdf_values.len());
    for (i, &f) in cdf_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Contract(format!("cdf value {f} at index {i} outside [0, 1]")));
        }
        if f < prev {
            return Err(Error::Contract(format!(
                "cdf decreases at index {i}: {prev} -> {f}"
            )));
        }
        out.push(f - prev);
        prev = f;
    }
    Ok(out)
}

/// P-vector from the closed-form oracle (fast path, no particles).
pub fn analytic_channel_response(params: &ChannelParams) -> Result<ChannelResponse> {
    params.validate()?;
    let cdf: Vec<f64> = (1..=params.n_slots())
        .map(|l| {
            hitting_cdf(
                params.diffusion_coeff,
                params.tx_distance,
                params.receiver_radius,
                l as f64 * params.slot_width,
            )
        })
        .collect();
    let p = cumulative_to_slots(&cdf)?;
    ChannelResponse::with_memory_duration(p, params.slot_width, DEFAULT_MEMORY_DURATION)
}

/// Serialises a P-vector in the cache format: `Ts=`, `N=`, then `P<l>=` lines.
/// `n_particles = 0` marks an analytically computed response.
pub fn format_pvector(response: &ChannelResponse, n_particles: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Ts={}", response.slot_width());
    let _ = writeln!(out, "N={n_particles}");
    for (l, p) in response.p().iter().enumerate() {
        let _ = writeln!(out, "P{}={}", l + 1, p);
    }
    out
}

/// Parses the cache format. Returns the slot width, the particle count and
/// the P-vector in slot order.
pub fn parse_pvector(text: &str, source_name: &str) -> Result<(f64, u64, Vec<f64>)> {
    let err = |line: usize, msg: String| Error::Parse {
        source_name: source_name.to_string(),
        message: format!("line {line}: {msg}"),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut field = |key: &str| -> Result<(usize, String)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing `{key}=` line")))?;
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(no, format!("expected `key=value`, got `{line}`")))?;
        if k.trim() != key {
            return Err(err(no, format!("expected key `{key}`, got `{}`", k.trim())));
        }
        Ok((no, v.trim().to_string()))
    };

    let (no, ts) = field("Ts")?;
    let ts: f64 = ts.parse().map_err(|e| err(no, format!("bad Ts: {e}")))?;
    let (no, n) = field("N")?;
    let n: u64 = n.parse().map_err(|e| err(no, format!("bad N: {e}")))?;

    let mut p = Vec::new();
    for (no, line) in lines {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(no, format!("expected `P<l>=value`, got `{line}`")))?;
        let expected = format!("P{}", p.len() + 1);
        if k.trim() != expected {
            return Err(err(no, format!("expected key `{expected}`, got `{}`", k.trim())));
        }
        p.push(v.trim().parse().map_err(|e| err(no, format!("bad value: {e}")))?);
    }
    if p.is_empty() {
        return Err(err(0, "no P<l> entries".into()));
    }
    Ok((ts, n, p))
}

pub fn write_pvector_file(path: &Path, response: &ChannelResponse, n_particles: u64) -> Result<()> {
    std::fs::write(path, format_pvector(response, n_particles)).map_err(|e| Error::io(path, e))
}

/// Reads a cached P-vector; memory is derived from `memory_duration`.
pub fn read_pvector_file(path: &Path, memory_duration: f64) -> Result<(ChannelResponse, u64)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (ts, n, p) = parse_pvector(&text, &path.display().to_string())?;
    Ok((ChannelResponse::with_memory_duration(p, ts, memory_duration)?, n))
}
