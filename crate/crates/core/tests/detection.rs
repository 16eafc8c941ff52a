mod common;

use molcom::channel::{transmit_frame_with, MoleculeType, Noise, RxFrame, TxFrame};
use molcom::detection::{
    combine_llrs, compute_llrs, deinterleave_llr, hard_detect, interleave, LlrVector, Permutation,
};
use molcom::diffusion::ChannelResponse;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rx(counts: Vec<f64>) -> RxFrame {
    RxFrame {
        counts,
        molecule_type: MoleculeType::A,
    }
}

fn floor(m: f64, p1: f64) -> f64 {
    (1e-3 * m * p1).max(1.0)
}

#[test]
fn llrs_match_naive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for memory in 1..=3usize {
        let (mut checked, mut drawn) = (0, 0);
        while checked < 1000 {
            drawn += 1;
            let mut p: Vec<f64> = (0..memory + 2).map(|_| rng.random_range(0.001..0.19)).collect();
            p.sort_by(|a, b| b.total_cmp(a));
            let response = ChannelResponse::new(p.clone(), 0.15, memory).unwrap();
            let m: f64 = rng.random_range(5.0..3000.0);
            let i = rng.random_range(0..memory + 3);
            let hi = m * p[..=memory].iter().sum::<f64>();
            let count = rng.random_range(-0.2 * hi..1.2 * hi);
            let mut counts = vec![0.0; i + 1];
            counts[i] = count;
            let got = compute_llrs(&rx(counts), m, &response).unwrap()[i];
            if let Some(expected) = common::naive_llr(count, i, m, &p[..=memory], floor(m, p[0])) {
                checked += 1;
                assert!(
                    (got - expected).abs() <= 1e-9,
                    "L={memory} i={i} m={m} count={count}: {got} vs {expected}"
                );
            }
        }
        assert!(drawn < 2000, "naive path underflowed on {} of {drawn} draws", drawn - checked);
    }
}

#[test]
fn second_slot_with_unit_memory_matches_four_hypotheses() {
    let (p1, p2) = (0.2, 0.1);
    let response = ChannelResponse::new(vec![p1, p2, 0.05], 0.15, 1).unwrap();
    let m = 200.0;
    let x = 31.0;
    let fl = floor(m, p1);
    let pdf = |mean: f64, var: f64| {
        let var = f64::max(var, fl);
        (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
    };
    let v = |p: f64| m * p * (1.0 - p);
    let zero = pdf(0.0, 0.0) + pdf(m * p2, v(p2));
    let one = pdf(m * p1, v(p1)) + pdf(m * (p1 + p2), v(p1) + v(p2));
    let expected = (zero / one).ln();
    let got = compute_llrs(&rx(vec![0.0, x]), m, &response).unwrap()[1];
    assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
}

#[test]
fn zero_current_tap_gives_zero_llr() {
    let response = ChannelResponse::new(vec![0.0, 0.1, 0.05, 0.02], 0.15, 2).unwrap();
    let counts = vec![0.0, 12.0, 40.0, -3.0, 7.5];
    let l = compute_llrs(&rx(counts), 500.0, &response).unwrap();
    assert!(l.iter().all(|&v| v.abs() < 1e-12), "{:?}", &*l);
}

#[test]
fn hard_detect_recovers_isolated_pulses() {
    let response = ChannelResponse::new(vec![0.15, 0.05, 0.02, 0.01], 0.15, 2).unwrap();
    let m = 1000.0;
    let bits = vec![1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0];
    let expected_counts = common::convolution(&bits, m, response.taps());
    let frame = transmit_frame_with(&TxFrame::new(bits.clone(), m).unwrap(), &response, Noise::Suppressed)
        .unwrap();
    for (a, b) in frame.counts.iter().zip(&expected_counts) {
        assert!((a - b).abs() < 1e-9);
    }
    // isolated pulses: every ISI sum (0.07 M) stays below M P1 / 2
    assert_eq!(hard_detect(&frame, m * 0.15 / 2.0).unwrap(), bits);
}

#[test]
fn random_permutations_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for t in 0..1000u64 {
        let n = rng.random_range(1..64);
        let perm = Permutation::random(n, t);
        let llr = LlrVector::new((0..n).map(|_| rng.random_range(-40.0..40.0)).collect());
        // bring codeword-order values into interleaved order, then back
        let inter = LlrVector::new((0..n).map(|k| llr[perm.inverse().get(k)]).collect());
        assert_eq!(deinterleave_llr(&inter, &perm).unwrap(), llr);
        let bits: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
        let ib = interleave(&bits, &perm).unwrap();
        let back: Vec<u8> = (0..n).map(|j| ib[perm.get(j)]).collect();
        assert_eq!(back, bits);
    }
}

proptest! {
    #[test]
    fn first_slot_llr_decreases_with_count(
        m in 50.0f64..5000.0,
        p1 in 0.05f64..0.4,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let response = ChannelResponse::new(vec![p1, 0.05, 0.01], 0.15, 1).unwrap();
        // unequal-variance Gaussians: monotone for counts >= 0
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        let x0 = lo * 2.0 * m * p1;
        let x1 = hi * 2.0 * m * p1;
        let l = compute_llrs(&rx(vec![x0]), m, &response).unwrap()[0];
        let h = compute_llrs(&rx(vec![x1]), m, &response).unwrap()[0];
        if l.abs() < 30.0 || h.abs() < 30.0 {
            prop_assert!(h < l, "LLR({x0})={l} LLR({x1})={h}");
        } else {
            prop_assert!(h <= l);
        }
    }

    #[test]
    fn combining_keeps_agreeing_signs(a in prop::collection::vec(-50.0f64..50.0, 1..40), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<f64> = a.iter().map(|&x| x.signum() * rng.random_range(0.001..50.0)).collect();
        let out = combine_llrs(&LlrVector::new(a.clone()), &LlrVector::new(b)).unwrap();
        for (x, y) in a.iter().zip(out.iter()) {
            if *x != 0.0 {
                prop_assert_eq!(x.signum(), y.signum());
            }
        }
    }

    #[test]
    fn clamping_never_changes_a_decision(raw in prop::collection::vec(-1e6f64..1e6, 1..40)) {
        let clamped = LlrVector::new(raw.clone());
        for (r, c) in raw.iter().zip(clamped.iter()) {
            prop_assert!(c.abs() <= 30.0);
            if *r != 0.0 {
                prop_assert_eq!(r.signum(), c.signum());
            }
        }
    }
}
