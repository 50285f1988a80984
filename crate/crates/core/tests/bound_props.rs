use std::f64::consts::TAU;

use proptest::prelude::*;
use spherevol::index::{
    audit_chain, cap_curvature_integral, connection_pullback_integral, ellipse_length,
    ellipse_length_agm, index_report, lower_bound, verify_bound, ChainVariant, IndexConfig,
};
use spherevol::minimizers::{canonical_field, closed_form_volume, PerturbedField, DEFAULT_PHASE};
use spherevol::quadrature::{volume, QuadratureConfig};
use spherevol::sphere::{Mirrored, Rotated};
use spherevol::{AngleField, Error};

fn cheap() -> ProptestConfig {
    ProptestConfig::with_cases(12)
}

/// The default grid, doubled until the volume converges (kinked integrands
/// need more longitude nodes to reach the same relative tolerance).
fn converging_config<F: AngleField + ?Sized>(f: &F) -> QuadratureConfig {
    let mut cfg = QuadratureConfig::default();
    for _ in 0..3 {
        match volume(f, &cfg) {
            Err(Error::NotConverged { .. }) => cfg = cfg.refined(),
            other => {
                other.unwrap();
                return cfg;
            }
        }
    }
    panic!("volume did not converge after three refinements");
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn indices_sum_to_euler_characteristic(k in 1i64..=6, amp in 0.0..0.6f64, seed in any::<u64>()) {
        let f = PerturbedField::random(k, amp, seed).unwrap();
        let r = index_report(&f, &IndexConfig::default()).unwrap();
        prop_assert_eq!((r.index_north, r.index_south), (k, 2 - k));
    }

    #[test]
    fn pullback_counts_winding(k in 1i64..=5, seed in any::<u64>(), alpha in -1.5..1.5f64) {
        let f = PerturbedField::random(k, 0.3, seed).unwrap();
        let got = connection_pullback_integral(&f, alpha);
        let expect = TAU * ((k - 1) as f64 + alpha.sin());
        prop_assert!((got - expect).abs() < 1e-8, "{got} vs {expect}");
    }

    #[test]
    fn bound_holds_under_perturbation(k in 1i64..=4, amp in 0.0..0.5f64, seed in any::<u64>()) {
        let f = PerturbedField::random(k, amp, seed).unwrap();
        let r = verify_bound(&f, &converging_config(&f), &IndexConfig::default()).unwrap();
        prop_assert!(r.margin >= -(r.error_estimate + 1e-6 * r.bound), "{r:?}");
    }

    #[test]
    fn chain_is_monotone_under_perturbation(k in 1i64..=4, seed in any::<u64>()) {
        let f = PerturbedField::random(k, 0.3, seed).unwrap();
        let c = audit_chain(&f, k, &converging_config(&f), ChainVariant::Absolute).unwrap();
        prop_assert!(c.is_monotone());
    }

    #[test]
    fn volume_is_isometry_invariant(k in 1i64..=4, seed in any::<u64>(), angle in 0.0..TAU) {
        let f = PerturbedField::random(k, 0.3, seed).unwrap();
        let cfg = converging_config(&f);
        let v = volume(&f, &cfg).unwrap();
        let rotated = volume(&Rotated { inner: f.clone(), angle }, &cfg).unwrap();
        let mirrored = volume(&Mirrored(f), &cfg).unwrap();
        let tol = 4.0 * v.error_estimate + 1e-9 * v.value;
        prop_assert!((v.value - rotated.value).abs() < tol);
        prop_assert!((v.value - mirrored.value).abs() < tol);
    }
}

#[test]
fn stokes_matches_cap_integral() {
    for k in 1..=5 {
        let f = canonical_field(k, DEFAULT_PHASE).unwrap();
        for alpha in [-1.2, -0.4, 0.0, 0.5, 1.3] {
            let lhs = connection_pullback_integral(&f, alpha);
            let rhs = TAU * (k as f64) - cap_curvature_integral(alpha);
            assert!((lhs - rhs).abs() < 1e-10, "k={k} alpha={alpha}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn ellipse_routes_agree() {
    for k in 1..=12 {
        let a = ellipse_length(k).unwrap();
        let b = ellipse_length_agm(k).unwrap();
        assert!((a - b).abs() < 1e-10, "k={k}: {a} vs {b}");
    }
}

#[test]
fn ellipse_quarter_period_matches_full_period() {
    for k in [1i64, 3, 4, 7, 12] {
        let n = 4096;
        let kf = k as f64;
        let full: f64 = (0..n)
            .map(|i| {
                let s = (TAU * i as f64 / n as f64).sin();
                ((kf - 2.0).powi(2) + 4.0 * (kf - 1.0) * s * s).sqrt()
            })
            .sum::<f64>()
            * TAU
            / n as f64;
        assert!((full - ellipse_length(k).unwrap()).abs() < 1e-10, "k={k}");
    }
}

#[test]
fn closed_forms_agree_with_quadrature() {
    let cfg = QuadratureConfig::default();
    for k in 1..=6 {
        let b = lower_bound(k).unwrap();
        let c = closed_form_volume(k).unwrap();
        let q = volume(&canonical_field(k, DEFAULT_PHASE).unwrap(), &cfg).unwrap();
        assert!((c - b).abs() < 1e-9 * b, "k={k}");
        assert!((q.value - b).abs() < 1e-6 * b, "k={k}");
    }
}

#[test]
fn refinement_stays_within_error_estimate() {
    let cfg = QuadratureConfig::default();
    let f = PerturbedField::random(3, 0.4, 7).unwrap();
    let coarse = volume(&f, &cfg).unwrap();
    let fine = volume(&f, &cfg.refined()).unwrap();
    assert!((coarse.value - fine.value).abs() <= coarse.error_estimate + 1e-9 * coarse.value);
}

#[test]
fn reflection_flips_indices() {
    let f = Mirrored(canonical_field(3, DEFAULT_PHASE).unwrap());
    let r = index_report(&f, &IndexConfig::default()).unwrap();
    assert_eq!((r.index_north, r.index_south), (-1, 3));
    assert_eq!(r.sup_index, 3);
    assert_eq!(f.winding(), -2);
}
