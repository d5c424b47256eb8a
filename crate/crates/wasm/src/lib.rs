//! Browser bindings for the Werner-state demo page in `www/`.
//!
//! Each export has a plain Rust counterpart returning `Result<_, String>` so
//! it can be tested natively.

use kexcess::bell_max;
use kexcess::expsim::{
    bell_max_standard_error, estimate_bell_max, simulate_bell_records, ExperimentConfig,
    SignalBasis,
};
use kexcess::states::werner;
use kexcess::sweep::{angle_grid, excess_surface, knowledge_sweep};
use wasm_bindgen::prelude::*;

fn grid(step_deg: f64) -> Result<Vec<f64>, String> {
    if !(step_deg.is_finite() && (0.1..=45.0).contains(&step_deg)) {
        return Err(format!("step {step_deg} outside 0.1..=45 degrees"));
    }
    Ok(angle_grid(0.0, 90.0, step_deg))
}

/// Row-major `ΔK²(ϑ) + ΔK'²(ϑ')` over `ϑ, ϑ' ∈ [0°, 90°]`, followed by the bound `(B_max/2)²`.
pub fn surface_values(p: f64, step_deg: f64) -> Result<Vec<f64>, String> {
    let st = werner(p).map_err(|e| e.to_string())?;
    let g = grid(step_deg)?;
    let points = excess_surface(&st, &g, &g, None).map_err(|e| e.to_string())?;
    let bound = points.first().map_or(0.0, |pt| pt.bound);
    Ok(points
        .iter()
        .map(|pt| pt.sum)
        .chain(std::iter::once(bound))
        .collect())
}

/// Flattened rows `(ϑ, ΔK_HV, ΔK_XY)`.
pub fn curve_values(p: f64, step_deg: f64) -> Result<Vec<f64>, String> {
    let st = werner(p).map_err(|e| e.to_string())?;
    let g = grid(step_deg)?;
    let hv = knowledge_sweep(&st, SignalBasis::Hv, &g, None).map_err(|e| e.to_string())?;
    let xy = knowledge_sweep(&st, SignalBasis::Xy, &g, None).map_err(|e| e.to_string())?;
    Ok(hv
        .iter()
        .zip(&xy)
        .flat_map(|(a, b)| [a.theta_deg, a.dk, b.dk])
        .collect())
}

/// `(B̂_max, standard error, B_max)` from simulated counts at the four Bell angles.
pub fn bell_estimate(p: f64, counts_per_point: f64, seed: u64) -> Result<Vec<f64>, String> {
    if !(counts_per_point.is_finite() && counts_per_point >= 1.0) {
        return Err("counts per point must be at least 1".into());
    }
    let st = werner(p).map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig {
        pair_rate: counts_per_point,
        duration: 1.0,
        dark_coincidence_rate: 0.0,
        seed,
    };
    let records = simulate_bell_records(&st, &cfg, 0);
    let b = estimate_bell_max(&records).map_err(|e| e.to_string())?;
    let se = bell_max_standard_error(&records).map_err(|e| e.to_string())?;
    Ok(vec![b, se, bell_max(&st)])
}

#[wasm_bindgen]
pub fn surface(p: f64, step_deg: f64) -> Result<Vec<f64>, JsError> {
    surface_values(p, step_deg).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn curves(p: f64, step_deg: f64) -> Result<Vec<f64>, JsError> {
    curve_values(p, step_deg).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate_bell(p: f64, counts_per_point: f64, seed: u64) -> Result<Vec<f64>, JsError> {
    bell_estimate(p, counts_per_point, seed).map_err(|e| JsError::new(&e))
}
