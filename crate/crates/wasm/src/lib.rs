//! Browser bindings for the costeval demo page. Every export takes plain
//! numbers and returns a JSON string; errors become JS exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use costeval::cost_model::{votes_to_delta, VoteCount};
use costeval::datasets::{split, SplitSpec};
use costeval::harness::{run_method, Method};
use costeval::learners::TrainConfig;
use costeval::metrics::{delta_histogram, HistogramBin};
use costeval::synthetic::{generate, SyntheticConfig};

#[derive(Serialize)]
pub struct VotePoint {
    pub yes: u64,
    pub no: u64,
    pub delta: f64,
}

/// Δ = ln((yes+1)/(no+1)) for every split of `total` votes.
pub fn vote_curve(total: u64) -> Result<Vec<VotePoint>, String> {
    if total > 10_000 {
        return Err("at most 10000 annotators".into());
    }
    Ok((0..=total)
        .map(|yes| VotePoint {
            yes,
            no: total - yes,
            delta: votes_to_delta(VoteCount::new(yes, total - yes)),
        })
        .collect())
}

fn synthetic(n: usize, dim: usize, noise_sigma: f64, seed: u64) -> SyntheticConfig {
    SyntheticConfig {
        n,
        dim,
        noise_sigma,
        seed,
        ..SyntheticConfig::default()
    }
}

pub fn synthetic_histogram(
    n: usize,
    dim: usize,
    noise_sigma: f64,
    seed: u64,
    bins: usize,
) -> Result<Vec<HistogramBin>, String> {
    let (ds, _) = generate(&synthetic(n, dim, noise_sigma, seed)).map_err(|e| e.to_string())?;
    delta_histogram(&ds, bins).map_err(|e| e.to_string())
}

#[derive(Serialize)]
pub struct MethodRow {
    pub method: String,
    pub n_fit: usize,
    pub nec: f64,
    pub error_rate: f64,
    pub ratio: Option<f64>,
    pub delta_mae: Option<f64>,
}

/// One seed of the method comparison on a synthetic dataset: 80/10/10 split,
/// every method trained on the same training split and scored on test.
pub fn compare_methods(
    n: usize,
    dim: usize,
    noise_sigma: f64,
    seed: u64,
    methods: &str,
) -> Result<Vec<MethodRow>, String> {
    if n > 20_000 || dim > 200 {
        return Err("keep n ≤ 20000 and dim ≤ 200 in the browser".into());
    }
    let methods: Vec<Method> = methods
        .split(',')
        .map(|m| m.trim().parse::<Method>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let (ds, _) = generate(&synthetic(n, dim, noise_sigma, seed)).map_err(|e| e.to_string())?;
    let parts = split(&ds, &SplitSpec { seed, ..SplitSpec::default() }).map_err(|e| e.to_string())?;
    methods
        .into_iter()
        .map(|m| {
            let r = run_method(m, &parts.train, &parts.test, &TrainConfig::default(), seed)
                .map_err(|e| format!("{m}: {e}"))?;
            Ok(MethodRow {
                method: m.to_string(),
                n_fit: r.n_fit,
                nec: r.report.nec,
                error_rate: r.report.error_rate,
                ratio: r.report.ratio,
                delta_mae: r.report.delta_mae,
            })
        })
        .collect()
}

fn to_js<T: Serialize>(value: Result<T, String>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = voteCurve)]
pub fn vote_curve_js(total: u32) -> Result<String, JsError> {
    to_js(vote_curve(total.into()))
}

#[wasm_bindgen(js_name = syntheticHistogram)]
pub fn synthetic_histogram_js(n: u32, dim: u32, noise_sigma: f64, seed: u32, bins: u32) -> Result<String, JsError> {
    to_js(synthetic_histogram(n as usize, dim as usize, noise_sigma, seed.into(), bins as usize))
}

#[wasm_bindgen(js_name = compareMethods)]
pub fn compare_methods_js(n: u32, dim: u32, noise_sigma: f64, seed: u32, methods: &str) -> Result<String, JsError> {
    to_js(compare_methods(n as usize, dim as usize, noise_sigma, seed.into(), methods))
}
