//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.
#![allow(dead_code)]

use molcom::ldpc::LdpcCode;

/// Deterministic convolution of `bits` with `m * taps`, starting from an
/// empty channel.
pub fn convolution(bits: &[u8], m: f64, taps: &[f64]) -> Vec<f64> {
    (0..bits.len())
        .map(|i| {
            let mut s = 0.0;
            for (l, &p) in taps.iter().enumerate() {
                if l <= i && bits[i - l] == 1 {
                    s += m * p;
                }
            }
            s
        })
        .collect()
}

fn gaussian_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Direct-probability LLR for slot `i` (no log-sum-exp): plain sums of
/// densities over every history pattern, then `ln(s0 / s1)`. Returns `None`
/// when either sum underflows.
pub fn naive_llr(count: f64, i: usize, m: f64, taps: &[f64], floor: f64) -> Option<f64> {
    let depth = i.min(taps.len() - 1);
    let mut sums = [0.0f64; 2];
    for (current, sum) in sums.iter_mut().enumerate() {
        for pattern in 0..(1usize << depth) {
            let mut bits = vec![current as u8];
            bits.extend((0..depth).map(|l| ((pattern >> l) & 1) as u8));
            let mut mean = 0.0;
            let mut var = 0.0;
            for (b, &p) in bits.iter().zip(taps) {
                if *b == 1 {
                    mean += m * p;
                    var += m * p * (1.0 - p);
                }
            }
            *sum += gaussian_pdf(count, mean, var.max(floor));
        }
    }
    if sums[0] > 1e-300 && sums[1] > 1e-300 {
        Some((sums[0] / sums[1]).ln().clamp(-30.0, 30.0))
    } else {
        None
    }
}

/// Every codeword of a small code, by enumerating all `2^n` words against H.
pub fn enumerate_codewords(code: &LdpcCode) -> Vec<Vec<u8>> {
    let n = code.n();
    let h = code.parity_check();
    (0..1u32 << n)
        .map(|w| (0..n).map(|j| ((w >> j) & 1) as u8).collect::<Vec<u8>>())
        .filter(|word| {
            h.iter()
                .all(|row| row.iter().zip(word).map(|(a, b)| a & b).sum::<u8>() % 2 == 0)
        })
        .collect()
}

/// Maximum-likelihood codeword for LLR input: maximises `sum_j (1 - 2c_j) llr_j`.
pub fn ml_decode<'a>(codewords: &'a [Vec<u8>], llr: &[f64]) -> &'a [u8] {
    codewords
        .iter()
        .max_by(|a, b| {
            let score = |c: &Vec<u8>| -> f64 {
                c.iter()
                    .zip(llr)
                    .map(|(&b, &l)| if b == 0 { l } else { -l })
                    .sum()
            };
            score(a).total_cmp(&score(b))
        })
        .unwrap()
}

/// Dense GF(2) product `H w^T`.
pub fn dense_syndrome(h: &[Vec<u8>], word: &[u8]) -> Vec<u8> {
    h.iter()
        .map(|row| row.iter().zip(word).map(|(a, b)| a & b).sum::<u8>() % 2)
        .collect()
}

/// `G H^T` over GF(2).
pub fn generator_times_parity(g: &[Vec<u8>], h: &[Vec<u8>]) -> Vec<Vec<u8>> {
    g.iter().map(|grow| dense_syndrome(h, grow)).collect()
}

/// Absorbing-sphere first-passage CDF for a point source at distance `r0`.
pub fn hitting_cdf(t: f64, d: f64, r0: f64, rr: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    rr / r0 * libm::erfc((r0 - rr) / (2.0 * (d * t).sqrt()))
}

/// Per-slot absorption probabilities from the closed-form CDF.
pub fn analytic_slots(slots: usize, ts: f64, d: f64, r0: f64, rr: f64) -> Vec<f64> {
    (1..=slots)
        .map(|l| hitting_cdf(l as f64 * ts, d, r0, rr) - hitting_cdf((l - 1) as f64 * ts, d, r0, rr))
        .collect()
}

/// Textbook flooding sum-product over a dense H with the same stopping rule
/// (syndrome check after each iteration).
pub fn reference_bp(h: &[Vec<u8>], llr: &[f64], iterations: usize) -> Vec<u8> {
    let (m, n) = (h.len(), llr.len());
    let mut c2v = vec![vec![0.0; n]; m];
    let mut post = llr.to_vec();
    let hard = |post: &[f64]| post.iter().map(|&x| (x < 0.0) as u8).collect::<Vec<u8>>();
    if dense_syndrome(h, &hard(&post)).iter().all(|&s| s == 0) {
        return hard(&post);
    }
    for _ in 0..iterations {
        let v2c: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..n).map(|j| post[j] - c2v[i][j]).collect())
            .collect();
        for i in 0..m {
            for j in 0..n {
                if h[i][j] == 1 {
                    let mut prod = 1.0;
                    for k in 0..n {
                        if k != j && h[i][k] == 1 {
                            prod *= (v2c[i][k] / 2.0).tanh();
                        }
                    }
                    c2v[i][j] = 2.0 * prod.clamp(-1.0 + 1e-12, 1.0 - 1e-12).atanh();
                }
            }
        }
        for j in 0..n {
            post[j] = llr[j] + (0..m).filter(|&i| h[i][j] == 1).map(|i| c2v[i][j]).sum::<f64>();
        }
        if dense_syndrome(h, &hard(&post)).iter().all(|&s| s == 0) {
            break;
        }
    }
    hard(&post)
}
