//! Browser bindings for the demo page in `www/`.
//!
//! Everything runs on the closed-form channel so the page stays responsive;
//! the particle simulation is far too slow for a single browser thread.

use molcom::channel::{MoleculeType, RxFrame};
use molcom::config::{Scheme, SimConfig};
use molcom::detection::compute_llrs;
use molcom::diffusion::{analytic_channel_response, ChannelParams, ChannelResponse};
use molcom::harness::Simulation;
use molcom::ldpc::{build_regular_code, LdpcCode};
use wasm_bindgen::prelude::*;

fn params(diffusion_coeff: f64, tx_distance: f64, receiver_radius: f64, slot_width: f64) -> ChannelParams {
    ChannelParams {
        diffusion_coeff,
        tx_distance,
        receiver_radius,
        slot_width,
        ..ChannelParams::default()
    }
}

fn js(e: molcom::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn response(
    diffusion_coeff: f64,
    tx_distance: f64,
    receiver_radius: f64,
    slot_width: f64,
) -> molcom::Result<ChannelResponse> {
    analytic_channel_response(&params(diffusion_coeff, tx_distance, receiver_radius, slot_width))
}

/// Per-slot absorption probabilities P1..Pm over the default 2.1 s window.
#[wasm_bindgen]
pub fn channel_response(
    diffusion_coeff: f64,
    tx_distance: f64,
    receiver_radius: f64,
    slot_width: f64,
) -> Result<Vec<f64>, JsError> {
    response(diffusion_coeff, tx_distance, receiver_radius, slot_width)
        .map(|r| r.p().to_vec())
        .map_err(js)
}

fn llr_samples(response: &ChannelResponse, molecules: f64, max_count: f64, points: usize) -> molcom::Result<Vec<f64>> {
    // a long run of slots so the last one sees the full ISI history
    let slot = response.memory() + 1;
    (0..points)
        .map(|i| {
            let count = max_count * i as f64 / (points.max(2) - 1) as f64;
            let mut counts = vec![0.0; slot + 1];
            counts[slot] = count;
            let rx = RxFrame {
                counts,
                molecule_type: MoleculeType::A,
            };
            compute_llrs(&rx, molecules, response).map(|l| l[slot])
        })
        .collect()
}

/// LLR of a slot with full ISI history, sampled on `points` counts from 0 to
/// `max_count`.
#[wasm_bindgen]
pub fn llr_curve(
    molecules: f64,
    diffusion_coeff: f64,
    tx_distance: f64,
    receiver_radius: f64,
    slot_width: f64,
    max_count: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let r = response(diffusion_coeff, tx_distance, receiver_radius, slot_width).map_err(js)?;
    llr_samples(&r, molecules, max_count, points).map_err(js)
}

/// Cached (200,100) code; construction takes a noticeable moment in wasm.
fn code() -> LdpcCode {
    thread_local! {
        static CODE: LdpcCode = build_regular_code(200, 100, 1).expect("default code builds");
    }
    CODE.with(Clone::clone)
}

fn run_point(scheme: &str, molecules: f64, frames: u64, seed: u64) -> molcom::Result<Vec<f64>> {
    let config = SimConfig {
        scheme: scheme.parse::<Scheme>()?,
        analytic_channel: true,
        max_frames: frames,
        target_frame_errors: frames,
        master_seed: seed,
        ..SimConfig::default()
    };
    let r = analytic_channel_response(&config.channel_params())?;
    let point = Simulation::new(config, code(), r)?.run_ber_point(molecules)?;
    Ok(vec![point.ber, point.fer, point.frames as f64, point.bit_errors as f64])
}

/// One Monte-Carlo point on the default channel: `[ber, fer, frames, bit_errors]`.
#[wasm_bindgen]
pub fn ber_point(scheme: &str, molecules: f64, frames: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    run_point(scheme, molecules, frames as u64, seed as u64).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_response_peaks_first() {
        let p = response(79.4, 10.0, 5.0, 0.15).unwrap();
        assert_eq!(p.p().len(), 14);
        assert!(p.p().iter().skip(1).all(|&x| x < p.p()[0]));
    }

    #[test]
    fn llr_falls_with_count() {
        let r = response(79.4, 10.0, 5.0, 0.15).unwrap();
        let l = llr_samples(&r, 1000.0, 400.0, 50).unwrap();
        assert_eq!(l.len(), 50);
        assert!(l[0] > 0.0 && l[49] < 0.0);
    }

    #[test]
    fn point_is_reproducible() {
        let a = run_point("diversity", 100.0, 20, 3).unwrap();
        assert_eq!(a, run_point("diversity", 100.0, 20, 3).unwrap());
        assert_eq!(a[2], 20.0);
        assert!(run_point("nonsense", 100.0, 20, 3).is_err());
    }
}
