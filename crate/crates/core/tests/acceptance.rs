//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p spherevol --test acceptance -- --nocapture --test-threads 1`
//! to see the lines in order.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::{Duration, Instant};

use spherevol::bundle::{
    graph_surface_mesh, immersion_rank_check, mean_curvature_of, ruled_decomposition_check,
    sup_abs_mean_curvature, CurvatureGrid,
};
use spherevol::index::{
    audit_chain, connection_pullback_integral, ellipse_length, ellipse_length_agm, index_report,
    lower_bound, verify_bound, ChainVariant, IndexConfig,
};
use spherevol::minimizers::{
    canonical_field, optimize_field, CanonicalField, GridField, Mode, OptimizeConfig,
    PerturbedField, DEFAULT_PHASE,
};
use spherevol::quadrature::{volume, QuadratureConfig};

fn report(id: &str, pass: bool, detail: String) {
    println!("criterion {id}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn perturbation_suite() -> Vec<PerturbedField> {
    let mut fields = Vec::new();
    for k in 1..=4 {
        for seed in 0..20 {
            fields.push(PerturbedField::random(k, 0.3, 1000 * k as u64 + seed).unwrap());
        }
    }
    fields
}

#[test]
fn criterion_01_equality_at_minimizers() {
    let start = Instant::now();
    let cfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        let v = volume(&canonical_field(k, DEFAULT_PHASE).unwrap(), &cfg).unwrap();
        let b = lower_bound(k).unwrap();
        worst = worst.max((v.value - b).abs() / b);
    }
    let anchors = (ellipse_length(1).unwrap() - TAU).abs() < 1e-12
        && (ellipse_length(2).unwrap() - 8.0).abs() < 1e-12;
    let elapsed = start.elapsed();
    report(
        "1",
        worst < 1e-6 && anchors && elapsed < Duration::from_secs(10),
        format!("max rel err {worst:.2e} (k = 1..6), anchors ok = {anchors}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_bound_under_perturbation() {
    let start = Instant::now();
    let cfg = QuadratureConfig::default();
    let icfg = IndexConfig::default();
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for f in perturbation_suite() {
        let r = verify_bound(&f, &cfg, &icfg).unwrap();
        let slack = r.margin + r.error_estimate + 1e-6 * r.bound;
        min_slack = min_slack.min(slack);
        if slack < 0.0 {
            violations += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        "2",
        violations == 0 && elapsed < Duration::from_secs(60),
        format!("80 fields, violations {violations}, min slack {min_slack:.3e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_03_stokes_identity() {
    let mut worst: f64 = 0.0;
    for k in 1..=5 {
        let v = canonical_field(k, DEFAULT_PHASE).unwrap();
        for i in 0..10 {
            let alpha = -1.5 + 3.0 * i as f64 / 9.0;
            let got = connection_pullback_integral(&v, alpha);
            let expect = TAU * ((k - 1) as f64 + alpha.sin());
            worst = worst.max((got - expect).abs());
        }
    }
    report("3", worst < 1e-8, format!("max abs err {worst:.2e} (k = 1..5, 10 latitudes)"));
}

#[test]
fn criterion_04_index_suite() {
    let icfg = IndexConfig::default();
    let mut canonical_ok = true;
    for k in 1..=6 {
        let r = index_report(&canonical_field(k, DEFAULT_PHASE).unwrap(), &icfg).unwrap();
        canonical_ok &= (r.index_north, r.index_south) == (k, 2 - k);
    }
    let mut hopf_ok = true;
    for f in perturbation_suite() {
        hopf_ok &= match index_report(&f, &icfg) {
            Ok(r) => r.index_north + r.index_south == 2 && r.sup_index == f.base.k,
            Err(_) => false,
        };
    }
    report(
        "4",
        canonical_ok && hopf_ok,
        format!("canonical (k, 2-k) for k = 1..6: {canonical_ok}; sum = 2 on 86 fields: {hopf_ok}"),
    );
}

#[test]
fn criterion_05_chain_audit() {
    let cfg = QuadratureConfig::default();
    let mut monotone = 0;
    let mut failures = Vec::new();
    for f in perturbation_suite() {
        match audit_chain(&f, f.base.k, &cfg, ChainVariant::Absolute) {
            Ok(_) => monotone += 1,
            Err(e) => failures.push(e.to_string()),
        }
    }
    let mut tight = true;
    let mut worst_spread: f64 = 0.0;
    for k in 1..=6 {
        let v = canonical_field(k, DEFAULT_PHASE).unwrap();
        let c = audit_chain(&v, k, &cfg, ChainVariant::Absolute).unwrap();
        worst_spread = worst_spread.max(c.spread() / c.values[4]);
        tight &= c.spread() <= c.tolerance;
    }
    report(
        "5",
        failures.is_empty() && tight,
        format!(
            "monotone {monotone}/80, canonical chains tight: {tight} (max rel spread {worst_spread:.2e}){}",
            failures.first().map(|e| format!(", first failure: {e}")).unwrap_or_default()
        ),
    );
}

#[test]
fn criterion_06_ellipse_oracle() {
    let worst = (1..=12)
        .map(|k| (ellipse_length(k).unwrap() - ellipse_length_agm(k).unwrap()).abs())
        .fold(0.0, f64::max);
    report("6", worst < 1e-10, format!("max |trapezoid - AGM| {worst:.2e} (k = 1..12)"));
}

fn topology_line(k: i64) -> (bool, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    for (na, nb) in [(32, 128), (64, 256)] {
        let m = graph_surface_mesh(k, na, nb).unwrap();
        let chi = m.euler_characteristic();
        let orientable = m.orientability().orientable;
        pass &= chi == 0 && !orientable && m.is_closed();
        parts.push(format!("{na}x{nb}: chi = {chi}, orientable = {orientable}"));
    }
    (pass, parts.join("; "))
}

#[test]
fn criterion_07_topology_k4() {
    let (pass, detail) = topology_line(4);
    report("7 (k = 4)", pass, detail);
}

/// The index of `v_2` at `S` is 0, so the southern closure is a disk and
/// the closed surface is a projective plane (chi = 1), not a Klein bottle.
#[test]
fn criterion_07_topology_k2() {
    let (pass, detail) = topology_line(2);
    report("7 (k = 2)", pass, detail);
}

#[test]
fn criterion_08_ruled_and_immersion() {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [2, 4, 6] {
        let r = ruled_decomposition_check(k, 10_000);
        let i = immersion_rank_check(k, 10_000);
        pass &= r.passed && r.overlap_witness_ok && i.passed;
        parts.push(format!("k={k}: ruled {} immersion {} (min sv {:.3})", r.passed, i.passed, i.min_singular_value));
    }
    let odd = ruled_decomposition_check(3, 10_000);
    let degenerate = immersion_rank_check(0, 10_000);
    pass &= !odd.passed && !degenerate.passed;
    parts.push(format!("odd k=3 fails: {}, degenerate j fails: {}", !odd.passed, !degenerate.passed));
    report("8", pass, parts.join("; "));
}

#[test]
fn criterion_09_minimality() {
    let start = Instant::now();
    let grid = CurvatureGrid::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [2, 4] {
        let r = sup_abs_mean_curvature(&canonical_field(k, 0.0).unwrap(), &grid).unwrap();
        pass &= r.sup_abs_h <= 5e-3;
        parts.push(format!("k={k}: sup|H| {:.2e}", r.sup_abs_h));
    }
    let control = PerturbedField::new(
        CanonicalField { k: 2, theta0: 0.0 },
        vec![Mode::new(0.4, 1, 0, FRAC_PI_2, 0.0)],
    );
    let r = sup_abs_mean_curvature(&control, &grid).unwrap();
    pass &= r.sup_abs_h > 5e-2;
    parts.push(format!("control sup|H| {:.2e}", r.sup_abs_h));

    let (a, b) = (r.at.alpha, r.at.beta);
    let h = |s: f64| mean_curvature_of(&control, a, b, s, false).unwrap();
    let (h1, h2, h3) = (h(4e-2), h(2e-2), h(1e-2));
    let order = ((h1 - h2) / (h2 - h3)).abs().log2();
    pass &= (order - 2.0).abs() < 0.2;
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    parts.push(format!("FD order {order:.3}, {elapsed:.2?}"));
    report("9", pass, parts.join("; "));
}

#[test]
fn criterion_10_area_volume() {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [2, 4] {
        let area = graph_surface_mesh(k, 128, 512).unwrap().surface_area();
        let b = lower_bound(k).unwrap();
        let rel = (area - b).abs() / b;
        pass &= rel < 5e-3;
        parts.push(format!("k={k}: area {area:.6} vs {b:.6} (rel {rel:.2e})"));
    }
    report("10", pass, parts.join("; "));
}

#[test]
fn criterion_11_optimizer() {
    let cfg = OptimizeConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, seed) in [(1, 11), (3, 13)] {
        let start = PerturbedField::random(k, 0.3, seed).unwrap();
        let init = GridField::sample(&start, 32, 64, 1e-3).unwrap();
        let r = optimize_field(k, init, &cfg).unwrap();
        let descent = r.trace.windows(2).all(|w| w[1] <= w[0]);
        let last = *r.trace.last().unwrap();
        let rel = (last - r.bound).abs() / r.bound;
        let floor = r.trace.iter().all(|&e| e >= r.bound - r.tol_disc);
        pass &= descent && rel < 5e-3 && floor;
        parts.push(format!(
            "k={k}: {} -> {last:.6} vs {:.6} (rel {rel:.2e}), descent {descent}, above bound - tol_disc ({:.1e}) {floor}",
            r.trace[0], r.bound, r.tol_disc
        ));
    }
    report("11", pass, parts.join("; "));
}
