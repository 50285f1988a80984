//! Browser bindings. The page plots the bound against `k`, integrates a
//! randomly perturbed field with its audit chain and draws planar
//! projections of the Möbius bands `M_k ⊂ R⁴`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde_json::json;
use spherevol::bundle::moebius_point;
use spherevol::index::{
    audit_chain, ellipse_length, ellipse_length_agm, index_report, lower_bound, ChainVariant,
    IndexConfig,
};
use spherevol::minimizers::PerturbedField;
use spherevol::quadrature::{volume, QuadratureConfig};
use wasm_bindgen::prelude::*;

const MAX_K: i64 = 40;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn check_k(k: i64) -> Result<(), String> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(format!("k must lie in 1..={MAX_K}, got {k}"))
    }
}

/// Rows `{k, ellipse_length, ellipse_length_agm, bound}` for `k = 1..k_max`.
pub fn bound_curve_json(k_max: i64) -> Result<String, String> {
    check_k(k_max)?;
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let l = ellipse_length(k).map_err(|e| e.to_string())?;
        let agm = ellipse_length_agm(k).map_err(|e| e.to_string())?;
        let b = lower_bound(k).map_err(|e| e.to_string())?;
        rows.push(json!({"k": k, "ellipse_length": l, "ellipse_length_agm": agm, "bound": b}));
    }
    Ok(serde_json::Value::from(rows).to_string())
}

/// Volume, bound, polar indices and the five chain quantities of a random
/// perturbation of `v_k`.
pub fn perturbed_volume_json(k: i64, amplitude: f64, seed: u64) -> Result<String, String> {
    check_k(k)?;
    if !(0.0..=1.0).contains(&amplitude) {
        return Err("amplitude must lie in [0, 1]".into());
    }
    let f = PerturbedField::random(k, amplitude, seed).map_err(|e| e.to_string())?;
    let cfg = QuadratureConfig::default();
    let idx = index_report(&f, &IndexConfig::default()).map_err(|e| e.to_string())?;
    let v = volume(&f, &cfg).map_err(|e| e.to_string())?;
    let bound = lower_bound(k).map_err(|e| e.to_string())?;
    let chain = audit_chain(&f, k, &cfg, ChainVariant::Absolute).map_err(|e| e.to_string())?;
    Ok(json!({
        "k": k,
        "amplitude": amplitude,
        "seed": seed,
        "index_north": idx.index_north,
        "index_south": idx.index_south,
        "volume": v.value,
        "error_estimate": v.error_estimate,
        "bound": bound,
        "margin": v.value - bound,
        "chain": chain.values,
        "chain_tolerance": chain.tolerance,
    })
    .to_string())
}

/// Grid points of `M_k` over `r ∈ [-π/2, π/2]`, `t ∈ [0, π]`, projected to
/// the plane by `(cos a x₁ + sin a x₃, cos b x₂ + sin b x₄)`. The result is
/// `(n_t + 1)` polylines of `n_r + 1` points, flattened as `u, v` pairs.
pub fn moebius_projection(k: i64, n_r: usize, n_t: usize, a: f64, b: f64) -> Result<Vec<f64>, String> {
    check_k(k)?;
    if n_r == 0 || n_t == 0 || n_r * n_t > 200_000 {
        return Err("grid must be non-empty and at most 200000 cells".into());
    }
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    let mut out = Vec::with_capacity(2 * (n_r + 1) * (n_t + 1));
    for it in 0..=n_t {
        let t = PI * it as f64 / n_t as f64;
        for ir in 0..=n_r {
            let r = -FRAC_PI_2 + PI * ir as f64 / n_r as f64;
            let x = moebius_point(r, t, k);
            out.push(ca * x[0] + sa * x[2]);
            out.push(cb * x[1] + sb * x[3]);
        }
    }
    Ok(out)
}

#[wasm_bindgen(js_name = boundCurve)]
pub fn bound_curve(k_max: i32) -> Result<String, JsError> {
    bound_curve_json(k_max as i64).map_err(js_err)
}

#[wasm_bindgen(js_name = perturbedVolume)]
pub fn perturbed_volume(k: i32, amplitude: f64, seed: u32) -> Result<String, JsError> {
    perturbed_volume_json(k as i64, amplitude, seed as u64).map_err(js_err)
}

#[wasm_bindgen(js_name = moebiusProjection)]
pub fn moebius_projection_js(k: i32, n_r: u32, n_t: u32, a: f64, b: f64) -> Result<Vec<f64>, JsError> {
    moebius_projection(k as i64, n_r as usize, n_t as usize, a, b).map_err(js_err)
}
