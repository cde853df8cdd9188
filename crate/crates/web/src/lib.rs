//! WebAssembly bindings for the interactive demo page in `www/`.

mod demo;

pub use demo::{pso_trace, rate_curves, rate_landscape};

use wasm_bindgen::prelude::*;

fn js_err(e: ris_sr::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Best-so-far rate (bits/s/Hz) after each swarm update.
#[wasm_bindgen(js_name = psoTrace)]
pub fn pso_trace_js(
    m: usize,
    snr_db: f64,
    population: usize,
    iterations: usize,
    mu: f64,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    pso_trace(m, snr_db, population, iterations, mu, seed).map_err(js_err)
}

/// Flattened `[snr_db, pso, ris_only, sr_no_ris]` rows of mean rates.
#[wasm_bindgen(js_name = rateCurves)]
pub fn rate_curves_js(
    m: usize,
    snr_db: Vec<f64>,
    trials: usize,
    population: usize,
    iterations: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    rate_curves(m, &snr_db, trials, population, iterations, seed).map_err(js_err)
}

/// `resolution²` rates over both phases, then `[best_rate, θ1, θ2]`.
#[wasm_bindgen(js_name = rateLandscape)]
pub fn rate_landscape_js(snr_db: f64, resolution: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    rate_landscape(snr_db, resolution, seed).map_err(js_err)
}
