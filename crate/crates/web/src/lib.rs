//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; failures come back as
//! `{"error": "..."}` so the page has a single decoding path.

use std::f64::consts::{PI, TAU};

use giant_atom::design::{self, Extremum, ExtremumKind, Fig3Preset};
use giant_atom::spectral;
use giant_atom::{CouplingLayout, DensityOfStates, Environment};
use serde::Serialize;
use wasm_bindgen::prelude::*;

// With J = 1/4π and g_j = 1 every rate is measured in units of γ = 1.
fn unit_env() -> Environment {
    Environment::new(DensityOfStates::Constant(1.0 / (4.0 * PI)), 0.0, 1e6).expect("valid environment")
}

fn encode<T: Serialize>(r: Result<T, String>) -> String {
    let v = match r {
        Ok(v) => serde_json::to_value(v),
        Err(e) => Ok(serde_json::json!({ "error": e })),
    };
    v.and_then(|v| serde_json::to_string(&v))
        .unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

fn grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(2..=20_000).contains(&points) {
        return Err(format!("points must be in 2..=20000, got {points}"));
    }
    if max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
        return Err("the window must have max > min".into());
    }
    Ok((0..points)
        .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
        .collect())
}

#[derive(Serialize)]
struct LayoutCurves {
    nu: Vec<f64>,
    rate: Vec<f64>,
    shift: Vec<f64>,
    features: Features,
}

/// Rate `|Σ g_k e^{iφx_k}|²` and shift `Σ_{k<l} g_k g_l sin(φ(x_l-x_k))` of
/// an arbitrary layout against `ν = φ/2π`, with `φ` the phase across one
/// unit of length.
#[wasm_bindgen]
pub fn layout_response(positions: Vec<f64>, weights: Vec<f64>, nu_min: f64, nu_max: f64, points: usize) -> String {
    encode(layout_curves(positions, weights, nu_min, nu_max, points))
}

fn layout_curves(positions: Vec<f64>, weights: Vec<f64>, nu_min: f64, nu_max: f64, points: usize) -> Result<LayoutCurves, String> {
    let layout = CouplingLayout::new(positions, weights).map_err(|e| e.to_string())?;
    let nu = grid(nu_min, nu_max, points)?;
    let env = unit_env();
    let rate = nu.iter().map(|&v| spectral::coupling_strength(TAU * v, &layout)).collect();
    let shift = nu.iter().map(|&v| spectral::lamb_shift_sum(TAU * v, &layout, &env)).collect();
    let features = feature_scan(&layout, nu_min, nu_max);
    Ok(LayoutCurves { nu, rate, shift, features })
}

#[derive(Serialize)]
struct Features {
    maxima: Vec<Extremum>,
    minima: Vec<Extremum>,
}

fn feature_scan(layout: &CouplingLayout, a: f64, b: f64) -> Features {
    let f = |nu: f64| spectral::coupling_strength(TAU * nu, layout);
    Features {
        maxima: design::find_extrema(&f, a, b, 2001, ExtremumKind::Maximum),
        minima: design::find_extrema(&f, a, b, 2001, ExtremumKind::Minimum),
    }
}

#[derive(Serialize)]
struct SymmetricCurves {
    nu: Vec<f64>,
    rate: Vec<f64>,
    lamb: Vec<f64>,
    mirror_rate: Vec<f64>,
    mirror_lamb: Vec<f64>,
}

/// Closed forms for `n` equally spaced, equally weighted points against
/// `φ/2π ∈ [0, 2]`, in units of the single-point rate `γ`.
#[wasm_bindgen]
pub fn symmetric_curves(n: usize, points: usize) -> String {
    encode(symmetric(n, points))
}

fn symmetric(n: usize, points: usize) -> Result<SymmetricCurves, String> {
    if !(1..=200).contains(&n) {
        return Err(format!("n must be in 1..=200, got {n}"));
    }
    let nu = grid(0.0, 2.0, points)?;
    let phis: Vec<f64> = nu.iter().map(|v| TAU * v).collect();
    Ok(SymmetricCurves {
        rate: phis.iter().map(|&p| spectral::symmetric_rate(1.0, n, p)).collect(),
        lamb: phis.iter().map(|&p| spectral::symmetric_lamb_closed(1.0, n, p)).collect(),
        mirror_rate: phis.iter().map(|&p| spectral::symmetric_mirror_rate(1.0, n, p)).collect(),
        mirror_lamb: phis.iter().map(|&p| spectral::symmetric_mirror_lamb(1.0, n, p)).collect(),
        nu,
    })
}

#[derive(Serialize)]
struct PresetCurves {
    name: &'static str,
    positions: Vec<f64>,
    weights: Vec<f64>,
    #[serde(flatten)]
    curves: LayoutCurves,
}

/// One of the designed four-point layouts (`two-maxima`, `flat-maximum`,
/// `shallow-minima`, or `a`/`b`/`c`) with its curve on `ν ∈ [0.25, 1.75]`.
#[wasm_bindgen]
pub fn preset_curve(name: &str, points: usize) -> String {
    encode(preset(name, points))
}

fn preset(name: &str, points: usize) -> Result<PresetCurves, String> {
    let p = Fig3Preset::from_name(name).map_err(|e| e.to_string())?;
    let layout = p.layout();
    let curves = layout_curves(layout.positions.clone(), layout.weights.clone(), 0.25, 1.75, points)?;
    Ok(PresetCurves {
        name: p.name(),
        positions: layout.positions,
        weights: layout.weights,
        curves,
    })
}
