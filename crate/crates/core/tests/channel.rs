mod common;

use molcom::channel::{transmit_diversity, transmit_frame, transmit_frame_with, Noise, TxFrame};
use molcom::detection::Permutation;
use molcom::diffusion::{analytic_channel_response, ChannelParams, ChannelResponse};
use proptest::prelude::*;

fn response() -> ChannelResponse {
    analytic_channel_response(&ChannelParams::default()).unwrap()
}

proptest! {
    #[test]
    fn noiseless_output_is_truncated_convolution(
        bits in prop::collection::vec(0u8..2, 1..=32),
        m in 0.0f64..1e5,
        memory in 1usize..=9,
    ) {
        let mut r = response();
        r.set_memory(memory).unwrap();
        let rx = transmit_frame_with(&TxFrame::new(bits.clone(), m).unwrap(), &r, Noise::Suppressed).unwrap();
        let expected = common::convolution(&bits, m, r.taps());
        for (a, b) in rx.counts.iter().zip(&expected) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn sample_moments_match_gaussian_model() {
    let r = response();
    let m = 400.0;
    let bits: Vec<u8> = vec![1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0];
    let trials = 10_000;
    let frame = TxFrame::new(bits.clone(), m).unwrap();
    let samples: Vec<Vec<f64>> = (0..trials)
        .map(|s| transmit_frame(&frame, &r, s).unwrap().counts)
        .collect();
    let taps = r.taps();
    for i in 0..bits.len() {
        let column: Vec<f64> = samples.iter().map(|c| c[i]).collect();
        let (mean, var) = mean_var(&column);
        let mut exp_mean = 0.0;
        let mut exp_var = 0.0;
        for (l, &p) in taps.iter().enumerate() {
            if l <= i && bits[i - l] == 1 {
                exp_mean += m * p;
                exp_var += m * p * (1.0 - p);
            }
        }
        let n = trials as f64;
        let se_mean = (exp_var / n).sqrt();
        let se_var = exp_var * (2.0 / (n - 1.0)).sqrt();
        assert!((mean - exp_mean).abs() <= 5.0 * se_mean, "slot {i}: mean {mean} vs {exp_mean}");
        assert!((var - exp_var).abs() <= 5.0 * se_var, "slot {i}: var {var} vs {exp_var}");
    }
}

#[test]
fn diversity_streams_are_uncorrelated() {
    let r = response();
    let n = 32;
    let codeword: Vec<u8> = (0..n).map(|i| ((i * 5 + 1) % 3 != 0) as u8).collect();
    let perm = Permutation::random(n, 99);
    let (mean_a, mean_b) = transmit_diversity_means(&codeword, &perm, &r);
    let trials = 10_000u64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for s in 0..trials {
        let (a, b) = transmit_diversity(&codeword, &perm, 600.0, &r, s).unwrap();
        let da = a.counts[20] - mean_a[20];
        let db = b.counts[20] - mean_b[20];
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    let corr = sab / (saa * sbb).sqrt();
    assert!(corr.abs() <= 0.05, "correlation {corr}");
}

fn transmit_diversity_means(codeword: &[u8], perm: &Permutation, r: &ChannelResponse) -> (Vec<f64>, Vec<f64>) {
    let inter = molcom::detection::interleave(codeword, perm).unwrap();
    (
        common::convolution(codeword, 300.0, r.taps()),
        common::convolution(&inter, 300.0, r.taps()),
    )
}

#[test]
fn interleaving_preserves_released_molecules() {
    let codeword: Vec<u8> = (0..50).map(|i| (i % 7 < 3) as u8).collect();
    let perm = Permutation::random(50, 3);
    let inter = molcom::detection::interleave(&codeword, &perm).unwrap();
    let weight = |w: &[u8]| w.iter().map(|&b| b as f64).sum::<f64>();
    let total = 1000.0;
    let released = total / 2.0 * (weight(&codeword) + weight(&inter));
    assert_eq!(released, total * weight(&codeword));
}
