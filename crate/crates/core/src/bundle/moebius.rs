//! The band `M_k = {(r cos t, r sin t, cos kt, sin kt)} ⊂ R⁴`, its ruled
//! structure and immersion, and how it parametrizes the closure of the
//! graph of `v_k` over each hemisphere.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::mesh::{Ambient, SurfaceMesh};
use super::{reflect, trivialize, trivialize_south};
use crate::error::{Error, Result};
use crate::minimizers::canonical_field;
use crate::sphere::field_vector_on_meridian;

/// `j(r, t) = (r cos t, r sin t, cos kt, sin kt)`.
pub fn moebius_point(r: f64, t: f64, k: i64) -> [f64; 4] {
    let kt = k as f64 * t;
    [r * t.cos(), r * t.sin(), kt.cos(), kt.sin()]
}

/// The point `(-π/4, 0, 1, 0)` lies on both families of rulings at `t = 0`.
pub const RULED_OVERLAP_WITNESS: [f64; 4] = [-std::f64::consts::FRAC_PI_4, 0.0, 1.0, 0.0];

const RECONSTRUCTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub r: f64,
    pub t: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuledReport {
    pub k: i64,
    pub samples: usize,
    pub passed: bool,
    /// Largest error writing `j(r, t)` on the segment `O_t H_t`.
    pub max_error_forward: f64,
    /// Largest error mapping a point of `G_t O_t` back into `M_k` through
    /// `r' = a π/2`, `t' = t + π`.
    pub max_error_backward: f64,
    /// The overlap witness lies on both families.
    pub overlap_witness_ok: bool,
    pub first_failure: Option<SampleFailure>,
}

/// Points on `[0, 1]²` from a rank-1 lattice, endpoints included.
fn unit_square_samples(n: usize) -> impl Iterator<Item = (f64, f64)> {
    let side = (n as f64).sqrt().ceil().max(2.0) as usize;
    (0..n).map(move |i| {
        let a = (i / side) as f64 / (side - 1) as f64;
        let b = (i % side) as f64 / (side - 1) as f64;
        (a.min(1.0), b)
    })
}

fn dist4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn lerp4(a: f64, x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| a * x[i] + (1.0 - a) * y[i])
}

fn ruling_ends(t: f64, k: i64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let kt = k as f64 * t;
    let (c, s) = (kt.cos(), kt.sin());
    let g = [-FRAC_PI_2 * t.cos(), -FRAC_PI_2 * t.sin(), c, s];
    let o = [0.0, 0.0, c, s];
    let h = [FRAC_PI_2 * t.cos(), FRAC_PI_2 * t.sin(), c, s];
    (g, o, h)
}

/// Checks `M_k = G_tO_t ∪ O_tH_t` in both directions at `n_samples`
/// points. The backward direction uses `cos k(t + π) = cos kt`, which holds
/// only for even `k`; odd `k` is reported as a failure.
pub fn ruled_decomposition_check(k: i64, n_samples: usize) -> RuledReport {
    let mut max_fwd: f64 = 0.0;
    let mut max_bwd: f64 = 0.0;
    let mut first_failure = None;
    for (u, v) in unit_square_samples(n_samples) {
        let (r, t) = (u * FRAC_PI_2, -PI + v * TAU);
        // forward: j(r, t) = (2r/π) H_t + (1 - 2r/π) O_t
        let (g, o, h) = ruling_ends(t, k);
        let q = moebius_point(r, t, k);
        let fwd = dist4(&q, &lerp4(r / FRAC_PI_2, &h, &o));
        // backward: a G_t + (1 - a) O_t = j(aπ/2, t + π)
        let a = u;
        let q1 = lerp4(a, &g, &o);
        let bwd = dist4(&q1, &moebius_point(a * FRAC_PI_2, t + PI, k));
        max_fwd = max_fwd.max(fwd);
        max_bwd = max_bwd.max(bwd);
        let err = fwd.max(bwd);
        if first_failure.is_none() && !(err < RECONSTRUCTION_TOL) {
            first_failure = Some(SampleFailure { r, t, error: err });
        }
    }
    let (g0, o0, _) = ruling_ends(0.0, k);
    let (_, opi, hpi) = ruling_ends(PI, k);
    let on_g = dist4(&lerp4(0.5, &g0, &o0), &RULED_OVERLAP_WITNESS);
    let on_h = dist4(&lerp4(0.5, &hpi, &opi), &RULED_OVERLAP_WITNESS);
    RuledReport {
        k,
        samples: n_samples,
        passed: first_failure.is_none(),
        max_error_forward: max_fwd,
        max_error_backward: max_bwd,
        overlap_witness_ok: on_g < RECONSTRUCTION_TOL && on_h < RECONSTRUCTION_TOL,
        first_failure,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmersionReport {
    pub k: i64,
    pub samples: usize,
    pub passed: bool,
    pub min_singular_value: f64,
    /// `(r, t)` where the smallest singular value occurred.
    pub argmin: (f64, f64),
}

/// Smallest singular value of the Jacobian of `j` over `r ∈ [-π/2, π/2]`,
/// `t ∈ [0, 2π]`, with `r = 0` always included.
pub fn immersion_rank_check(k: i64, n_samples: usize) -> ImmersionReport {
    let kf = k as f64;
    let mut min_sv = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    for (i, (u, v)) in unit_square_samples(n_samples).enumerate() {
        let r = if i % 7 == 0 { 0.0 } else { (2.0 * u - 1.0) * FRAC_PI_2 };
        let t = v * TAU;
        let (st, ct) = t.sin_cos();
        let (skt, ckt) = (kf * t).sin_cos();
        let jr = [ct, st, 0.0, 0.0];
        let jt = [-r * st, r * ct, -kf * skt, kf * ckt];
        let g11: f64 = jr.iter().map(|x| x * x).sum();
        let g22: f64 = jt.iter().map(|x| x * x).sum();
        let g12: f64 = jr.iter().zip(&jt).map(|(a, b)| a * b).sum();
        // smallest eigenvalue of the 2x2 Gram matrix
        let tr = 0.5 * (g11 + g22);
        let disc = (0.25 * (g11 - g22).powi(2) + g12 * g12).sqrt();
        let sv = (tr - disc).max(0.0).sqrt();
        if sv < min_sv {
            min_sv = sv;
            argmin = (r, t);
        }
    }
    ImmersionReport {
        k,
        samples: n_samples,
        passed: min_sv > 1e-8,
        min_singular_value: min_sv,
        argmin,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub k: i64,
    pub samples: usize,
    /// `φ∘ψ(M_k)` against `(p, v_k(p))` over the northern hemisphere.
    pub max_error_north: f64,
    /// Band used over the southern hemisphere: `M_{k-2}`, whose winding
    /// matches the index `2 - k` at `S`.
    pub south_band: i64,
    pub max_error_south: f64,
    pub passed: bool,
}

/// Maps sampled points of the bands through the trivializations and
/// compares them with the graph of `v_k` (phase 0), including the fibers
/// over the poles.
pub fn hemisphere_closure_check(k: i64, n_samples: usize) -> Result<ClosureReport> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidIndex {
            k,
            reason: "hemisphere closures are bands only for even k >= 2",
        });
    }
    let field = canonical_field(k, 0.0)?;
    let south_band = k - 2;
    let mut err_n: f64 = 0.0;
    let mut err_s: f64 = 0.0;
    for (u, v) in unit_square_samples(n_samples) {
        // stay inside the open disk of radius π/2
        let r = u * FRAC_PI_2 * (1.0 - 1e-9);
        let t = v * TAU;
        let x = [r * t.cos(), r * t.sin()];
        let alpha = FRAC_PI_2 - r;
        let beta = -t;

        let kt = k as f64 * t;
        let b = trivialize(x, [kt.cos(), kt.sin()])?;
        let expect = field_vector_on_meridian(&field, alpha, beta);
        err_n = err_n.max((b.w - expect).norm());

        let mt = south_band as f64 * t;
        let b = trivialize_south(x, [mt.cos(), mt.sin()])?;
        let expect = field_vector_on_meridian(&field, -alpha, beta);
        err_s = err_s.max((b.w - expect).norm());
        debug_assert!((reflect(&b.p) - crate::sphere::embed(alpha, beta)).norm() < 1e-12);
    }
    Ok(ClosureReport {
        k,
        samples: n_samples,
        max_error_north: err_n,
        south_band,
        max_error_south: err_s,
        passed: err_n < 1e-10 && err_s < 1e-10,
    })
}

/// Triangulated `M_k` in R⁴ over `r ∈ [-π/2, π/2]`, `t ∈ [0, π]` with
/// `(r, π) ~ (-r, 0)`; a band with one boundary circle.
pub fn moebius_mesh(k: i64, n_r: usize, n_t: usize) -> Result<SurfaceMesh> {
    if k % 2 != 0 {
        return Err(Error::InvalidIndex {
            k,
            reason: "the Moebius identification needs even k",
        });
    }
    if n_r < 2 || n_t < 3 {
        return Err(Error::InvalidConfig("moebius mesh needs n_r >= 2, n_t >= 3".into()));
    }
    let rows = n_r + 1;
    let r_of = |i: usize| -FRAC_PI_2 + PI * i as f64 / n_r as f64;
    let t_of = |j: usize| PI * j as f64 / n_t as f64;
    let mut vertices = Vec::with_capacity(rows * n_t);
    for i in 0..rows {
        for j in 0..n_t {
            vertices.push(moebius_point(r_of(i), t_of(j), k).to_vec());
        }
    }
    let id = |i: usize, j: usize| -> usize {
        if j == n_t {
            // t = π glues to t = 0 with r reversed
            (rows - 1 - i) * n_t
        } else {
            i * n_t + j
        }
    };
    let mut faces = Vec::new();
    for i in 0..n_r {
        for j in 0..n_t {
            let (a, b, c, d) = (id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    let identifications = (0..vertices.len()).collect();
    SurfaceMesh::new(4, Ambient::Euclidean, vertices, faces, identifications)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_examples() {
        for t in [0.0, 1.0, 4.0] {
            let q = moebius_point(0.0, t, 2);
            assert_eq!(q[..2], [0.0, 0.0]);
            assert!((q[2] - (2.0 * t).cos()).abs() < 1e-15);
        }
        for k in [2, 4, 6] {
            let a = moebius_point(0.7, 1.3, k);
            let b = moebius_point(-0.7, 1.3 + PI, k);
            assert!(dist4(&a, &b) < 1e-14);
        }
        let a = moebius_point(0.7, 1.3, 3);
        let b = moebius_point(-0.7, 1.3 + PI, 3);
        assert!(dist4(&a, &b) > 1.0);
    }

    #[test]
    fn ruled_even_and_odd() {
        for k in [2, 4, 6] {
            let r = ruled_decomposition_check(k, 2500);
            assert!(r.passed && r.overlap_witness_ok, "{r:?}");
        }
        let r = ruled_decomposition_check(3, 2500);
        assert!(!r.passed);
        assert!(r.first_failure.is_some());
        assert!(r.max_error_forward < 1e-12);
    }

    #[test]
    fn immersion_and_negative_control() {
        let r = immersion_rank_check(2, 1000);
        assert!(r.passed);
        assert!((r.min_singular_value - 1.0).abs() < 1e-12);
        let r = immersion_rank_check(0, 1000);
        assert!(!r.passed);
        assert_eq!(r.argmin.0, 0.0);
    }

    #[test]
    fn closures_match_canonical_graphs() {
        for k in [2, 4, 6] {
            let r = hemisphere_closure_check(k, 900).unwrap();
            assert!(r.passed, "{r:?}");
        }
        assert!(hemisphere_closure_check(3, 10).is_err());
    }

    #[test]
    fn band_topology() {
        let m = moebius_mesh(2, 8, 24).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert!(!m.orientability().orientable);
        assert!(!m.boundary_tags.is_empty());
    }
}
