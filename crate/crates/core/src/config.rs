//! Simulation configuration: flat JSON schema, defaults, overrides and validation.
//!
//! Units follow the physical-parameter convention: lengths in µm, diffusion
//! coefficient in µm²/s, times in seconds. Molecule budgets are molecules per
//! bit 1 (for diversity, the sum over both molecule types).

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::diffusion::ChannelParams;
use crate::{Error, Result};

/// Transmission scheme evaluated by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Single,
    Diversity,
    Preequalized,
    HardThreshold,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Single,
        Scheme::Diversity,
        Scheme::Preequalized,
        Scheme::HardThreshold,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Single => "single",
            Scheme::Diversity => "diversity",
            Scheme::Preequalized => "preequalized",
            Scheme::HardThreshold => "hard_threshold",
        }
    }

    pub(crate) fn domain(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.tag() == s)
            .ok_or_else(|| Error::invalid("scheme", format!("unknown scheme `{s}`")))
    }
}

/// Logarithmic grid `10^2 .. 10^6` with nine points, rounded to whole molecules.
pub fn default_mm_sweep() -> Vec<f64> {
    (0..9)
        .map(|i| 10f64.powf(2.0 + 0.5 * i as f64).round())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub scheme: Scheme,

    /// Simulated duration of the channel characterisation, s.
    pub total_time: f64,
    /// µm²/s.
    pub diffusion_coeff: f64,
    /// Transmitter to receiver centre, µm.
    pub tx_distance: f64,
    /// µm.
    pub receiver_radius: f64,
    pub n_particles: u64,
    /// Brownian step, s.
    pub sim_step: f64,
    /// Symbol slot Ts, s.
    pub slot_width: f64,
    /// Seed of the particle simulation.
    pub channel_seed: u64,
    /// Cached P-vector to use instead of simulating.
    pub channel_file: Option<String>,
    /// Use the closed-form P-vector instead of the particle simulation.
    pub analytic_channel: bool,

    pub n: usize,
    pub k: usize,
    pub code_seed: u64,
    /// alist file to load H from instead of constructing it.
    pub code_file: Option<String>,

    /// Retained channel memory, s; L = round(memory_duration / Ts).
    pub memory_duration: f64,
    /// Previous bits marginalised by the detector (defaults to L).
    pub hypothesis_bits: Option<usize>,

    pub mm_sweep: Vec<f64>,
    pub max_iter: usize,
    pub target_frame_errors: u64,
    pub max_frames: u64,
    pub master_seed: u64,
    /// Anti-stream strength of the pre-equalised baseline.
    pub beta: f64,
    /// Hard-threshold level; defaults to `M * P1 / 2`.
    pub threshold: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        let ch = ChannelParams::default();
        Self {
            scheme: Scheme::Single,
            total_time: ch.total_time,
            diffusion_coeff: ch.diffusion_coeff,
            tx_distance: ch.tx_distance,
            receiver_radius: ch.receiver_radius,
            n_particles: ch.n_particles,
            sim_step: ch.sim_step,
            slot_width: ch.slot_width,
            channel_seed: 1,
            channel_file: None,
            analytic_channel: false,
            n: 200,
            k: 100,
            code_seed: 1,
            code_file: None,
            memory_duration: crate::diffusion::DEFAULT_MEMORY_DURATION,
            hypothesis_bits: None,
            mm_sweep: default_mm_sweep(),
            max_iter: 10,
            target_frame_errors: 1020,
            max_frames: 1_000_000,
            master_seed: 0,
            beta: 1.0,
            threshold: None,
        }
    }
}

impl SimConfig {
    pub fn channel_params(&self) -> ChannelParams {
        ChannelParams {
            total_time: self.total_time,
            diffusion_coeff: self.diffusion_coeff,
            tx_distance: self.tx_distance,
            receiver_radius: self.receiver_radius,
            n_particles: self.n_particles,
            sim_step: self.sim_step,
            slot_width: self.slot_width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.channel_file.is_none() {
            self.channel_params().validate()?;
        }
        if self.code_file.is_none() && self.n != 2 * self.k {
            return Err(Error::invalid("n", format!("must equal 2k (k={})", self.k)));
        }
        if !(self.memory_duration.is_finite() && self.memory_duration > 0.0) {
            return Err(Error::invalid("memory_duration", "must be finite and > 0"));
        }
        if self.mm_sweep.is_empty() {
            return Err(Error::invalid("mm_sweep", "must not be empty"));
        }
        if self.mm_sweep.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::invalid("mm_sweep", "entries must be finite and >= 0"));
        }
        if self.mm_sweep.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("mm_sweep", "must be strictly ascending"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be >= 1"));
        }
        if self.target_frame_errors == 0 {
            return Err(Error::invalid("target_frame_errors", "must be >= 1"));
        }
        if self.max_frames == 0 {
            return Err(Error::invalid("max_frames", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid("beta", "must lie in [0, 1]"));
        }
        if let Some(t) = self.threshold {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::invalid("threshold", "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Stable hex digest of every field.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialises");
        let hash = Sha256::digest(canonical.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Applies `key=value` overrides on top of a JSON object. Values are read as
/// JSON when possible and as plain strings otherwise.
fn apply_overrides(object: &mut Map<String, Value>, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (key, raw) = item.split_once('=').ok_or_else(|| Error::Parse {
            source_name: "override".into(),
            message: format!("expected key=value, got `{item}`"),
        })?;
        let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().into()));
        object.insert(key.trim().to_string(), value);
    }
    Ok(())
}

/// Builds a validated config from JSON text plus overrides (overrides win).
pub fn parse_config_str(text: &str, source_name: &str, overrides: &[String]) -> Result<SimConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        message: e.to_string(),
    })?;
    let Value::Object(mut object) = value else {
        return Err(Error::Parse {
            source_name: source_name.to_string(),
            message: "top level must be a JSON object".into(),
        });
    };
    apply_overrides(&mut object, overrides)?;
    let config: SimConfig = serde_json::from_value(Value::Object(object)).map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

/// Reads a config file (or starts from `{}` when `path` is `None`).
pub fn parse_config(path: Option<&Path>, overrides: &[String]) -> Result<SimConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            parse_config_str(&text, &p.display().to_string(), overrides)
        }
        None => parse_config_str("{}", "<defaults>", overrides),
    }
}
