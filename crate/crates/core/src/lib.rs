//! Simulation toolkit for LDPC-coded molecular communication via diffusion.
//!
//! The pipeline mirrors a point-transmitter / absorbing-sphere link:
//!
//! * [`diffusion`] estimates the per-slot hit probabilities (the P-vector)
//!   by Brownian particle simulation, with a closed-form first-passage oracle.
//! * [`channel`] synthesises received molecule counts under intersymbol
//!   interference using the Gaussian transmission approximation.
//! * [`ldpc`] builds (3,6)-regular codes, encodes, and decodes with
//!   log-domain sum-product belief propagation.
//! * [`detection`] turns counts into LLRs by marginalising over the unknown
//!   history bits, and implements interleaving and diversity combining.
//! * [`harness`] runs the Monte-Carlo BER/FER protocol across schemes and
//!   molecule budgets.
//! * [`config`] and [`report`] hold the configuration schema and the file
//!   formats used by the command-line tool.

pub mod channel;
pub mod config;
pub mod detection;
pub mod diffusion;
mod error;
pub mod harness;
pub mod ldpc;
pub mod report;
pub mod seed;

pub use error::{Error, Result};

/// Magnitude bound applied to every LLR entering or leaving the decoder.
pub const LLR_CLAMP: f64 = 30.0;
