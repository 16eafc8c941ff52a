//! Monte-Carlo BER/FER estimation.
//!
//! Each frame draws a random message, encodes it, sends it through the
//! scheme's channel, computes LLRs and decodes with BP. A point keeps adding
//! frames in index order until the frame-error target or the frame cap is
//! reached. Frames may be computed ahead on worker threads, but tallies are
//! reduced in index order and anything past the stopping frame is discarded,
//! so results do not depend on the number of workers.

use rand::Rng;
use serde::Serialize;

use crate::channel::{self, Noise, TxFrame};
use crate::config::{Scheme, SimConfig};
use crate::detection::{
    combine_llrs, deinterleave_llr, hard_detect, DetectorConfig, LlrVector, MixtureDetector,
    Permutation, SignalModel,
};
use crate::diffusion::ChannelResponse;
use crate::ldpc::{decode_bp, LdpcCode};
use crate::{seed, Error, Result, LLR_CLAMP};

const PERMUTATION_DOMAIN: u64 = 0x5045_524d;
const FRAME_DOMAIN: u64 = 0x4652_414d;

/// Frames evaluated per scheduling round.
const BATCH: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    FrameErrors,
    MaxFrames,
}

impl StopReason {
    pub fn tag(self) -> &'static str {
        match self {
            StopReason::FrameErrors => "frame_errors",
            StopReason::MaxFrames => "max_frames",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub bit_errors: u64,
    pub frame_error: bool,
    /// Uncoded errors of the hard detector on the message positions
    /// (hard-threshold scheme only).
    pub raw_bit_errors: Option<u64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerPoint {
    pub mm: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub stopped_by: StopReason,
    pub raw_bit_errors: Option<u64>,
}

impl BerPoint {
    /// Binomial standard error of the BER estimate.
    pub fn ber_std_error(&self, k: usize) -> f64 {
        let trials = (self.frames * k as u64) as f64;
        (self.ber * (1.0 - self.ber) / trials).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerCurve {
    pub scheme: Scheme,
    pub config_digest: String,
    pub points: Vec<BerPoint>,
}

/// A prepared experiment: code, channel response and interleaver shared by
/// every frame of a sweep.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    code: LdpcCode,
    response: ChannelResponse,
    permutation: Permutation,
    workers: usize,
}

impl Simulation {
    /// The response's memory is reset from `config.memory_duration`.
    pub fn new(config: SimConfig, code: LdpcCode, mut response: ChannelResponse) -> Result<Self> {
        config.validate()?;
        let memory = ((config.memory_duration / response.slot_width()).round() as usize)
            .clamp(1, response.p().len() - 1);
        response.set_memory(memory)?;
        if let Some(h) = config.hypothesis_bits {
            if h > memory {
                return Err(Error::Configuration(format!(
                    "hypothesis_bits {h} exceeds channel memory {memory}"
                )));
            }
        }
        let permutation = Permutation::random(code.n(), seed::derive(config.master_seed, &[PERMUTATION_DOMAIN]));
        Ok(Self {
            config,
            code,
            response,
            permutation,
            workers: 1,
        })
    }

    /// Worker threads used by [`Self::run_ber_point`]; results are unaffected.
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.config.scheme = scheme;
        self
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    pub fn response(&self) -> &ChannelResponse {
        &self.response
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    fn frame_seed(&self, mm: f64, frame_index: u64) -> u64 {
        seed::derive(
            self.config.master_seed,
            &[FRAME_DOMAIN, self.config.scheme.domain(), mm.to_bits(), frame_index],
        )
    }

    fn detector(&self, molecules: f64, model: SignalModel) -> Result<MixtureDetector> {
        MixtureDetector::new(
            molecules,
            &self.response,
            &DetectorConfig {
                hypothesis_bits: self.config.hypothesis_bits,
                model,
            },
        )
    }

    /// Detectors are fixed per molecule budget; build them once per point.
    fn prepare(&self, mm: f64) -> Result<PointContext> {
        if !(mm.is_finite() && mm >= 0.0) {
            return Err(Error::Configuration(format!("molecule budget {mm} must be finite and >= 0")));
        }
        let detector = match self.config.scheme {
            Scheme::Single => Some(self.detector(mm, SignalModel::OnOff)?),
            Scheme::Diversity => Some(self.detector(mm / 2.0, SignalModel::OnOff)?),
            Scheme::Preequalized => Some(self.detector(
                mm,
                SignalModel::Differential {
                    beta: self.config.beta,
                },
            )?),
            Scheme::HardThreshold => None,
        };
        let threshold = self
            .config
            .threshold
            .unwrap_or(0.5 * mm * self.response.p()[0]);
        Ok(PointContext {
            mm,
            detector,
            threshold,
        })
    }

    /// One frame at molecule budget `mm`.
    pub fn run_frame(&self, mm: f64, frame_index: u64) -> Result<FrameOutcome> {
        let ctx = self.prepare(mm)?;
        self.frame(&ctx, frame_index)
    }

    fn frame(&self, ctx: &PointContext, frame_index: u64) -> Result<FrameOutcome> {
        let frame_seed = self.frame_seed(ctx.mm, frame_index);
        let mut rng = seed::rng(frame_seed);
        let message: Vec<u8> = (0..self.code.k()).map(|_| rng.random::<bool>() as u8).collect();
        let codeword = self.code.encode(&message)?;
        let noise = Noise::Seeded(seed::derive(frame_seed, &[1]));

        let mut raw_bit_errors = None;
        let llr: LlrVector = match self.config.scheme {
            Scheme::Single => {
                let rx = channel::transmit_frame_with(
                    &TxFrame::new(codeword, ctx.mm)?,
                    &self.response,
                    noise,
                )?;
                ctx.detector().llrs(&rx.counts)
            }
            Scheme::Diversity => {
                let (a, b) = channel::transmit_diversity_with(
                    &codeword,
                    &self.permutation,
                    ctx.mm,
                    &self.response,
                    noise,
                )?;
                let llr_a = ctx.detector().llrs(&a.counts);
                let llr_b = deinterleave_llr(&ctx.detector().llrs(&b.counts), &self.permutation)?;
                combine_llrs(&llr_a, &llr_b)?
            }
            Scheme::Preequalized => {
                let rx = channel::transmit_preequalized_with(
                    &codeword,
                    ctx.mm,
                    self.config.beta,
                    &self.response,
                    noise,
                )?;
                ctx.detector().llrs(&rx.counts)
            }
            Scheme::HardThreshold => {
                let rx = channel::transmit_frame_with(
                    &TxFrame::new(codeword, ctx.mm)?,
                    &self.response,
                    noise,
                )?;
                let hard = hard_detect(&rx, ctx.threshold)?;
                let raw = self.code.extract_message(&hard)?;
                raw_bit_errors = Some(count_differences(&raw, &message));
                LlrVector::new(
                    hard.iter()
                        .map(|&b| if b == 0 { LLR_CLAMP } else { -LLR_CLAMP })
                        .collect(),
                )
            }
        };

        let decoded = decode_bp(&self.code, &llr, self.config.max_iter)?;
        let estimate = self.code.extract_message(&decoded.bits)?;
        let bit_errors = count_differences(&estimate, &message);
        Ok(FrameOutcome {
            bit_errors,
            frame_error: bit_errors > 0,
            raw_bit_errors,
            converged: decoded.converged,
        })
    }

    /// Runs frames until `target_frame_errors` or `max_frames` is reached.
    pub fn run_ber_point(&self, mm: f64) -> Result<BerPoint> {
        let ctx = self.prepare(mm)?;
        let target = self.config.target_frame_errors;
        let cap = self.config.max_frames;
        let hard = self.config.scheme == Scheme::HardThreshold;

        let executor = Executor::new(self.workers)?;
        let (mut frames, mut bit_errors, mut frame_errors, mut raw) = (0u64, 0u64, 0u64, 0u64);
        let batch = BATCH * self.workers as u64;
        let stopped_by = 'outer: loop {
            let len = batch.min(cap - frames);
            for outcome in executor.run(frames..frames + len, |i| self.frame(&ctx, i))? {
                frames += 1;
                bit_errors += outcome.bit_errors;
                frame_errors += outcome.frame_error as u64;
                raw += outcome.raw_bit_errors.unwrap_or(0);
                if frame_errors >= target {
                    break 'outer StopReason::FrameErrors;
                }
                if frames == cap {
                    break 'outer StopReason::MaxFrames;
                }
            }
        };

        let k = self.code.k() as f64;
        Ok(BerPoint {
            mm,
            frames,
            bit_errors,
            frame_errors,
            ber: bit_errors as f64 / (frames as f64 * k),
            fer: frame_errors as f64 / frames as f64,
            stopped_by,
            raw_bit_errors: hard.then_some(raw),
        })
    }

    /// One point per entry of `mm_sweep`.
    pub fn run_sweep(&self) -> Result<BerCurve> {
        let points = self
            .config
            .mm_sweep
            .iter()
            .map(|&mm| self.run_ber_point(mm))
            .collect::<Result<Vec<_>>>()?;
        Ok(BerCurve {
            scheme: self.config.scheme,
            config_digest: self.config.digest(),
            points,
        })
    }
}

struct PointContext {
    mm: f64,
    detector: Option<MixtureDetector>,
    threshold: f64,
}

impl PointContext {
    fn detector(&self) -> &MixtureDetector {
        self.detector.as_ref().expect("soft schemes carry a detector")
    }
}

/// Evaluates frame indices in order, optionally on a dedicated thread pool.
struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    fn new(workers: usize) -> Result<Self> {
        #[cfg(feature = "parallel")]
        {
            let pool = if workers > 1 {
                Some(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(workers)
                        .build()
                        .map_err(|e| Error::Configuration(format!("thread pool: {e}")))?,
                )
            } else {
                None
            };
            Ok(Self { pool })
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = workers;
            Ok(Self {})
        }
    }

    fn run<F>(&self, range: std::ops::Range<u64>, f: F) -> Result<Vec<FrameOutcome>>
    where
        F: Fn(u64) -> Result<FrameOutcome> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| range.into_par_iter().map(&f).collect());
        }
        range.map(f).collect()
    }
}

fn count_differences(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}
