use std::f64::consts::PI;

use serde_json::Value;
use spherevol_wasm::{bound_curve_json, moebius_projection, perturbed_volume_json};

#[test]
fn bound_curve_starts_at_two_pi_squared() {
    let rows: Vec<Value> = serde_json::from_str(&bound_curve_json(3).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!((rows[0]["bound"].as_f64().unwrap() - 2.0 * PI * PI).abs() < 1e-12);
    assert!((rows[1]["bound"].as_f64().unwrap() - 8.0 * PI).abs() < 1e-12);
    assert!(bound_curve_json(0).is_err());
}

#[test]
fn perturbed_field_respects_bound() {
    let r: Value = serde_json::from_str(&perturbed_volume_json(3, 0.3, 7).unwrap()).unwrap();
    assert_eq!(r["index_north"], 3);
    assert_eq!(r["index_south"], -1);
    assert!(r["margin"].as_f64().unwrap() > 0.0);
    let chain: Vec<f64> = serde_json::from_value(r["chain"].clone()).unwrap();
    assert!(chain.windows(2).all(|w| w[1] <= w[0] + 1e-6));
    assert!(perturbed_volume_json(3, 2.0, 7).is_err());
}

#[test]
fn even_bands_close_up() {
    let (n_r, n_t) = (8, 12);
    let at = |pts: &[f64], it: usize, ir: usize| {
        let i = 2 * (it * (n_r + 1) + ir);
        (pts[i], pts[i + 1])
    };
    let even = moebius_projection(4, n_r, n_t, 0.6, 0.9).unwrap();
    assert_eq!(even.len(), 2 * (n_r + 1) * (n_t + 1));
    for ir in 0..=n_r {
        let (a, b) = (at(&even, n_t, ir), at(&even, 0, n_r - ir));
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }
    let odd = moebius_projection(3, n_r, n_t, 0.6, 0.9).unwrap();
    let (a, b) = (at(&odd, n_t, 0), at(&odd, 0, n_r));
    assert!((a.0 - b.0).abs() + (a.1 - b.1).abs() > 0.1);
    assert!(moebius_projection(2, 0, 4, 0.0, 0.0).is_err());
}
