//! Log-domain sum-product decoding on the Tanner graph of H.
//!
//! LLR convention: positive favours bit 0. Check nodes use the exact tanh
//! rule; inputs are clamped to `±LLR_CLAMP` and the outgoing tanh product is
//! kept at least `1e-12` away from ±1 so `atanh` stays finite.

use super::LdpcCode;
use crate::{Error, Result, LLR_CLAMP};

const PRODUCT_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub bits: Vec<u8>,
    pub iterations: usize,
    pub converged: bool,
}

#[inline]
fn hard(llr: f64) -> u8 {
    // tie -> 0
    (llr < 0.0) as u8
}

/// Decodes `llr` with at most `max_iter` iterations, stopping as soon as the
/// hard decision satisfies every check. A valid channel decision returns
/// with zero iterations.
pub fn decode_bp(code: &LdpcCode, llr: &[f64], max_iter: usize) -> Result<Decoded> {
    Error::check_len("llr", code.n(), llr.len())?;
    if max_iter == 0 {
        return Err(Error::invalid("max_iter", "must be >= 1"));
    }
    let channel: Vec<f64> = llr
        .iter()
        .map(|&v| if v.is_nan() { 0.0 } else { v.clamp(-LLR_CLAMP, LLR_CLAMP) })
        .collect();
    let mut bits: Vec<u8> = channel.iter().map(|&v| hard(v)).collect();
    if code.is_codeword(&bits) {
        return Ok(Decoded {
            bits,
            iterations: 0,
            converged: true,
        });
    }

    // edges grouped by check; edge_of[var] lists that variable's edges
    let checks = code.checks();
    let mut offsets = Vec::with_capacity(checks.len() + 1);
    let mut edge_var = Vec::new();
    offsets.push(0);
    for row in checks {
        edge_var.extend_from_slice(row);
        offsets.push(edge_var.len());
    }
    let mut edge_of: Vec<Vec<usize>> = vec![Vec::new(); code.n()];
    for (e, &v) in edge_var.iter().enumerate() {
        edge_of[v].push(e);
    }

    let mut var_to_check: Vec<f64> = edge_var.iter().map(|&v| channel[v]).collect();
    let mut check_to_var = vec![0.0; edge_var.len()];
    let mut tanhs = Vec::new();
    let mut suffix = Vec::new();

    for iteration in 1..=max_iter {
        for w in offsets.windows(2) {
            let (start, end) = (w[0], w[1]);
            tanhs.clear();
            tanhs.extend(
                var_to_check[start..end]
                    .iter()
                    .map(|&m| (0.5 * m.clamp(-LLR_CLAMP, LLR_CLAMP)).tanh()),
            );
            suffix.clear();
            suffix.resize(tanhs.len() + 1, 1.0);
            for i in (0..tanhs.len()).rev() {
                suffix[i] = suffix[i + 1] * tanhs[i];
            }
            let mut prefix = 1.0;
            for (i, t) in tanhs.iter().enumerate() {
                let product = (prefix * suffix[i + 1]).clamp(-1.0 + PRODUCT_MARGIN, 1.0 - PRODUCT_MARGIN);
                check_to_var[start + i] = 2.0 * product.atanh();
                prefix *= t;
            }
        }

        for (v, edges) in edge_of.iter().enumerate() {
            let total = channel[v] + edges.iter().map(|&e| check_to_var[e]).sum::<f64>();
            bits[v] = hard(total);
            for &e in edges {
                var_to_check[e] = total - check_to_var[e];
            }
        }

        if code.is_codeword(&bits) {
            return Ok(Decoded {
                bits,
                iterations: iteration,
                converged: true,
            });
        }
    }
    Ok(Decoded {
        bits,
        iterations: max_iter,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::build_regular_code;

    fn bpsk(word: &[u8], magnitude: f64) -> Vec<f64> {
        word.iter()
            .map(|&b| if b == 0 { magnitude } else { -magnitude })
            .collect()
    }

    #[test]
    fn strong_correct_llrs_decode_immediately() {
        let code = build_regular_code(200, 100, 4).unwrap();
        let u: Vec<u8> = (0..100).map(|i| ((i * 7) % 3 == 0) as u8).collect();
        let c = code.encode(&u).unwrap();
        let out = decode_bp(&code, &bpsk(&c, 20.0), 10).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 1);
        assert_eq!(out.bits, c);
    }

    #[test]
    fn all_zero_llrs_tie_to_zero_word() {
        let code = build_regular_code(8, 4, 0).unwrap();
        let out = decode_bp(&code, &[0.0; 8], 10).unwrap();
        assert_eq!(out.bits, vec![0; 8]);
        assert!(out.converged);
    }

    #[test]
    fn single_flip_corrected_on_large_code() {
        let code = build_regular_code(200, 100, 4).unwrap();
        let c = code.encode(&vec![1; 100]).unwrap();
        let mut llr = bpsk(&c, 5.0);
        llr[17] = -llr[17];
        let out = decode_bp(&code, &llr, 10).unwrap();
        assert!(out.converged && out.iterations >= 1);
        assert_eq!(out.bits, c);
    }

    #[test]
    fn saturated_inputs_stay_finite() {
        let code = build_regular_code(200, 100, 4).unwrap();
        let mut llr = vec![1e300; 200];
        llr[3] = f64::NEG_INFINITY;
        llr[9] = f64::NAN;
        let out = decode_bp(&code, &llr, 10).unwrap();
        assert!(out.converged);
        assert_eq!(out.bits, vec![0; 200]);
    }

    #[test]
    fn rejects_bad_arguments() {
        let code = build_regular_code(8, 4, 0).unwrap();
        assert!(decode_bp(&code, &[0.0; 7], 10).is_err());
        assert!(decode_bp(&code, &[0.0; 8], 0).is_err());
    }
}
