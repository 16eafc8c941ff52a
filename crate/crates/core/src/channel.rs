//! Gaussian synthesis of received molecule counts under ISI.
//!
//! For slot `i` the receiver sees `sum_{l=0..=L} bit[i-l] * g_l`, with each
//! `g_l` an independent Gaussian of mean `M * P_{l+1}` and standard deviation
//! `sqrt(M * P_{l+1} * (1 - P_{l+1}))`. Frames start with an empty channel.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::detection::Permutation;
use crate::diffusion::ChannelResponse;
use crate::{seed, Error, Result};

/// Messenger molecule type; diversity uses both, single-molecule only `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoleculeType {
    A,
    B,
}

/// OOK frame: bit 1 releases `molecules_per_one` molecules, bit 0 is silent.
#[derive(Debug, Clone, PartialEq)]
pub struct TxFrame {
    pub bits: Vec<u8>,
    pub molecules_per_one: f64,
}

impl TxFrame {
    pub fn new(bits: Vec<u8>, molecules_per_one: f64) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("bits", "entries must be 0 or 1"));
        }
        check_molecules("molecules_per_one", molecules_per_one)?;
        Ok(Self {
            bits,
            molecules_per_one,
        })
    }
}

/// Per-slot received quantity; real-valued and possibly negative.
#[derive(Debug, Clone, PartialEq)]
pub struct RxFrame {
    pub counts: Vec<f64>,
    pub molecule_type: MoleculeType,
}

/// Noise realisation for the Gaussian channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    /// Independent Gaussian draws from a stream keyed by the seed.
    Seeded(u64),
    /// Every term fixed at its mean.
    Suppressed,
}

fn check_molecules(field: &'static str, m: f64) -> Result<()> {
    if m.is_finite() && m >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, "molecule count must be finite and >= 0"))
    }
}

/// Sends `frame` through the channel with Gaussian noise keyed by `seed`.
pub fn transmit_frame(frame: &TxFrame, response: &ChannelResponse, seed: u64) -> Result<RxFrame> {
    transmit_frame_with(frame, response, Noise::Seeded(seed))
}

pub fn transmit_frame_with(
    frame: &TxFrame,
    response: &ChannelResponse,
    noise: Noise,
) -> Result<RxFrame> {
    if frame.bits.is_empty() {
        return Err(Error::invalid("bits", "frame must be non-empty"));
    }
    check_molecules("molecules_per_one", frame.molecules_per_one)?;
    let counts = synthesize(&frame.bits, frame.molecules_per_one, response, noise)?;
    Ok(RxFrame {
        counts,
        molecule_type: MoleculeType::A,
    })
}

fn synthesize(bits: &[u8], m: f64, response: &ChannelResponse, noise: Noise) -> Result<Vec<f64>> {
    let taps = response.taps();
    if taps.len() != response.memory() + 1 {
        return Err(Error::Configuration(format!(
            "response has {} taps, memory {} needs {}",
            taps.len(),
            response.memory(),
            response.memory() + 1
        )));
    }
    let stats: Vec<(f64, f64)> = taps
        .iter()
        .map(|&p| (m * p, (m * p * (1.0 - p)).max(0.0).sqrt()))
        .collect();

    let mut rng = match noise {
        Noise::Seeded(s) => Some(seed::rng(s)),
        Noise::Suppressed => None,
    };
    let mut counts = Vec::with_capacity(bits.len());
    for i in 0..bits.len() {
        let mut total = 0.0;
        for (l, &(mean, sd)) in stats.iter().enumerate().take(i + 1) {
            if bits[i - l] == 1 {
                total += match rng.as_mut() {
                    Some(rng) => mean + sd * rng.sample::<f64, _>(StandardNormal),
                    None => mean,
                };
            }
        }
        counts.push(total);
    }
    Ok(counts)
}

/// Seed of the type-B stream derived from the frame seed.
fn secondary_noise(noise: Noise) -> Noise {
    match noise {
        Noise::Seeded(s) => Noise::Seeded(seed::derive(s, &[1])),
        Noise::Suppressed => Noise::Suppressed,
    }
}

/// Two-molecule diversity: type A carries `codeword`, type B its interleaved
/// copy, each at half of `total_molecules` per bit 1, over independent channels.
pub fn transmit_diversity(
    codeword: &[u8],
    permutation: &Permutation,
    total_molecules: f64,
    response: &ChannelResponse,
    seed: u64,
) -> Result<(RxFrame, RxFrame)> {
    transmit_diversity_with(
        codeword,
        permutation,
        total_molecules,
        response,
        Noise::Seeded(seed),
    )
}

pub fn transmit_diversity_with(
    codeword: &[u8],
    permutation: &Permutation,
    total_molecules: f64,
    response: &ChannelResponse,
    noise: Noise,
) -> Result<(RxFrame, RxFrame)> {
    check_molecules("total_molecules", total_molecules)?;
    let interleaved = crate::detection::interleave(codeword, permutation)?;
    let per_type = total_molecules / 2.0;
    let a = transmit_frame_with(&TxFrame::new(codeword.to_vec(), per_type)?, response, noise)?;
    let mut b = transmit_frame_with(
        &TxFrame::new(interleaved, per_type)?,
        response,
        secondary_noise(noise),
    )?;
    b.molecule_type = MoleculeType::B;
    Ok((a, b))
}

/// Simplified pre-equalisation baseline. Type A carries the codeword at
/// `molecules` per bit 1; type B carries the complement at `beta * molecules`
/// per bit 0 of the original. The receiver output is `A - B`.
pub fn transmit_preequalized(
    codeword: &[u8],
    molecules: f64,
    beta: f64,
    response: &ChannelResponse,
    seed: u64,
) -> Result<RxFrame> {
    transmit_preequalized_with(codeword, molecules, beta, response, Noise::Seeded(seed))
}

pub fn transmit_preequalized_with(
    codeword: &[u8],
    molecules: f64,
    beta: f64,
    response: &ChannelResponse,
    noise: Noise,
) -> Result<RxFrame> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid("beta", "must lie in [0, 1]"));
    }
    let primary = transmit_frame_with(&TxFrame::new(codeword.to_vec(), molecules)?, response, noise)?;
    let complement: Vec<u8> = codeword.iter().map(|&b| 1 - b).collect();
    let anti = transmit_frame_with(
        &TxFrame::new(complement, beta * molecules)?,
        response,
        secondary_noise(noise),
    )?;
    let counts = primary
        .counts
        .iter()
        .zip(&anti.counts)
        .map(|(a, b)| a - b)
        .collect();
    Ok(RxFrame {
        counts,
        molecule_type: MoleculeType::A,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn response() -> ChannelResponse {
        ChannelResponse::new(vec![0.15, 0.08, 0.04, 0.02, 0.01], 0.15, 3).unwrap()
    }

    #[test]
    fn all_zero_bits_give_zero_counts() {
        let f = TxFrame::new(vec![0; 16], 500.0).unwrap();
        let rx = transmit_frame(&f, &response(), 9).unwrap();
        assert!(rx.counts.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn single_pulse_means() {
        let r = response();
        let mut bits = vec![0; 8];
        bits[0] = 1;
        let rx = transmit_frame_with(&TxFrame::new(bits, 1000.0).unwrap(), &r, Noise::Suppressed)
            .unwrap();
        let expected = [150.0, 80.0, 40.0, 20.0, 0.0, 0.0, 0.0, 0.0];
        for (a, b) in rx.counts.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9, "{:?}", rx.counts);
        }
    }

    #[test]
    fn two_ones_with_unit_memory() {
        let r = ChannelResponse::new(vec![0.2, 0.1, 0.05], 0.1, 1).unwrap();
        let rx = transmit_frame_with(&TxFrame::new(vec![1, 1], 100.0).unwrap(), &r, Noise::Suppressed)
            .unwrap();
        assert!((rx.counts[0] - 20.0).abs() < 1e-12);
        assert!((rx.counts[1] - 30.0).abs() < 1e-12);
    }

    #[test]
    fn empty_frame_and_bad_bits_rejected() {
        assert!(transmit_frame(&TxFrame { bits: vec![], molecules_per_one: 1.0 }, &response(), 0).is_err());
        assert!(TxFrame::new(vec![2], 1.0).is_err());
        assert!(TxFrame::new(vec![1], -1.0).is_err());
    }

    #[test]
    fn same_seed_same_counts() {
        let f = TxFrame::new(vec![1, 0, 1, 1, 0, 1], 300.0).unwrap();
        let a = transmit_frame(&f, &response(), 5).unwrap();
        let b = transmit_frame(&f, &response(), 5).unwrap();
        let c = transmit_frame(&f, &response(), 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn identity_diversity_without_noise_gives_equal_frames() {
        let bits = vec![1, 0, 1, 1, 0, 0, 1];
        let perm = Permutation::identity(bits.len());
        let (a, b) =
            transmit_diversity_with(&bits, &perm, 800.0, &response(), Noise::Suppressed).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.molecule_type, MoleculeType::A);
        assert_eq!(b.molecule_type, MoleculeType::B);
        // per-type budget is half the total
        let single = transmit_frame_with(
            &TxFrame::new(bits.clone(), 400.0).unwrap(),
            &response(),
            Noise::Suppressed,
        )
        .unwrap();
        assert_eq!(a.counts, single.counts);
    }

    #[test]
    fn diversity_length_mismatch() {
        let perm = Permutation::identity(4);
        assert!(matches!(
            transmit_diversity(&[1, 0, 1], &perm, 10.0, &response(), 0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn preequalized_beta_zero_matches_plain() {
        let bits = vec![1, 0, 0, 1, 1, 0, 1, 0];
        let plain = transmit_frame(&TxFrame::new(bits.clone(), 250.0).unwrap(), &response(), 77).unwrap();
        let pre = transmit_preequalized(&bits, 250.0, 0.0, &response(), 77).unwrap();
        assert_eq!(plain.counts, pre.counts);
    }

    #[test]
    fn preequalized_all_ones_matches_plain() {
        let bits = vec![1; 10];
        let plain = transmit_frame(&TxFrame::new(bits.clone(), 250.0).unwrap(), &response(), 3).unwrap();
        let pre = transmit_preequalized(&bits, 250.0, 0.7, &response(), 3).unwrap();
        assert_eq!(plain.counts, pre.counts);
    }

    #[test]
    fn preequalized_mean_arithmetic() {
        let r = ChannelResponse::new(vec![0.2, 0.1, 0.05], 0.1, 1).unwrap();
        let rx = transmit_preequalized_with(&[1, 0], 100.0, 1.0, &r, Noise::Suppressed).unwrap();
        assert!((rx.counts[0] - 20.0).abs() < 1e-12);
        assert!((rx.counts[1] - (10.0 - 20.0)).abs() < 1e-12);
        assert!(transmit_preequalized(&[1], 1.0, 1.5, &r, 0).is_err());
    }
}
