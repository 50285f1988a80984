//! Mean curvature of the graph `(α, β) ↦ (p, v(p))` inside `T¹S²`.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use super::{sasaki_differential, tangent_basis, Vec9};
use crate::error::{Error, Result};
use crate::minimizers::canonical_field;
use crate::par::map_indices;
use crate::sphere::{east_direction, embed, north_direction, AngleField, Vec3};

/// Latitudes closer than this to a pole are left out of curvature grids.
pub const DEFAULT_COLLAR: f64 = 0.05;

/// `(G_α, G_β)` of the embedded graph `G = Φ(p, v)` at `(α, β)`, computed
/// from the closed forms of `∂p` and `∂v`.
fn graph_partials<F: AngleField + ?Sized>(f: &F, a: f64, b: f64) -> (Vec3, Vec3, Vec9, Vec9) {
    let p = embed(a, b);
    let east = east_direction(b);
    let north = north_direction(a, b);
    let (st, ct) = f.theta(a, b).sin_cos();
    let w = east * ct + north * st;
    let turn = north * ct - east * st;
    let sa = a.sin();

    let p_a = north;
    let p_b = east * a.cos();
    // ∂north/∂α = -p, ∂east/∂α = 0
    let w_a = turn * f.d_alpha(a, b) - p * st;
    // ∂east/∂β = (-cos β, -sin β, 0), ∂north/∂β = -sin α · east
    let (sb, cb) = b.sin_cos();
    let w_b = turn * f.d_beta(a, b) + Vec3::new(-cb, -sb, 0.0) * ct - east * (sa * st);
    (
        p,
        w,
        sasaki_differential(&p, &w, &p_a, &w_a),
        sasaki_differential(&p, &w, &p_b, &w_b),
    )
}

fn second_partials<F: AngleField + ?Sized>(f: &F, a: f64, b: f64, h: f64) -> [Vec9; 3] {
    let ga = |x: f64, y: f64| graph_partials(f, x, y).2;
    let gb = |x: f64, y: f64| graph_partials(f, x, y).3;
    let g_aa = (ga(a + h, b) - ga(a - h, b)) / (2.0 * h);
    let g_bb = (gb(a, b + h) - gb(a, b - h)) / (2.0 * h);
    let g_ab = ((ga(a, b + h) - ga(a, b - h)) + (gb(a + h, b) - gb(a - h, b))) / (4.0 * h);
    [g_aa, g_ab, g_bb]
}

/// Mean curvature of the graph of `f` at `(α, β)` with central-difference
/// step `h`; with `richardson` the steps `h` and `h/2` are combined to
/// cancel the `h²` term.
///
/// The normal is the unit vector tangent to `T¹S²` and orthogonal to the
/// surface, signed so that its first non-negligible component is positive.
pub fn mean_curvature_of<F: AngleField + ?Sized>(
    f: &F,
    alpha: f64,
    beta: f64,
    h: f64,
    richardson: bool,
) -> Result<f64> {
    let (p, w, g_a, g_b) = graph_partials(f, alpha, beta);
    let g11 = g_a.dot(&g_a);
    let g12 = g_a.dot(&g_b);
    let g22 = g_b.dot(&g_b);
    let det = g11 * g22 - g12 * g12;
    if !(det >= 1e-12) {
        return Err(Error::DegenerateMetric { alpha, beta, det });
    }

    // orthonormalize the surface tangents, then strip them from the
    // ambient tangent basis; any non-zero remainder spans the normal
    let t1 = g_a / g11.sqrt();
    let t2 = {
        let v = g_b - t1 * t1.dot(&g_b);
        v / v.norm()
    };
    let mut normal = tangent_basis(&p, &w)
        .iter()
        .map(|b| b - t1 * t1.dot(b) - t2 * t2.dot(b))
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .expect("three basis vectors");
    normal /= normal.norm();
    if let Some(first) = normal.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            normal = -normal;
        }
    }

    let second = if richardson {
        let coarse = second_partials(f, alpha, beta, h);
        let fine = second_partials(f, alpha, beta, 0.5 * h);
        std::array::from_fn(|i| (fine[i] * 4.0 - coarse[i]) / 3.0)
    } else {
        second_partials(f, alpha, beta, h)
    };
    let [l11, l12, l22] = second.map(|v| v.dot(&normal));
    Ok((g22 * l11 - 2.0 * g12 * l12 + g11 * l22) / (2.0 * det))
}

/// Mean curvature of the graph of `v_k` (phase 0), with Richardson.
pub fn mean_curvature(k: i64, alpha: f64, beta: f64, h: f64) -> Result<f64> {
    mean_curvature_of(&canonical_field(k, 0.0)?, alpha, beta, h, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureGrid {
    pub n_alpha: usize,
    pub n_beta: usize,
    /// Latitudes within this distance of a pole are skipped.
    pub collar: f64,
    pub h: f64,
    pub richardson: bool,
}

impl Default for CurvatureGrid {
    fn default() -> Self {
        Self {
            n_alpha: 40,
            n_beta: 160,
            collar: DEFAULT_COLLAR,
            h: 1e-3,
            richardson: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub alpha: f64,
    pub beta: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupReport {
    pub sup_abs_h: f64,
    pub at: CurvatureSample,
    pub grid: CurvatureGrid,
}

/// `sup |H|` over a latitude/longitude grid whose rows run from
/// `-π/2 + collar` to `π/2 - collar`.
pub fn sup_abs_mean_curvature<F: AngleField + ?Sized>(f: &F, grid: &CurvatureGrid) -> Result<SupReport> {
    if grid.n_alpha < 2 || grid.n_beta < 1 || !(grid.collar > 0.0 && grid.collar < FRAC_PI_2) {
        return Err(Error::InvalidConfig("curvature grid is malformed".into()));
    }
    let top = FRAC_PI_2 - grid.collar;
    let rows = map_indices(grid.n_alpha, |i| -> Result<(f64, f64, f64)> {
        let a = -top + 2.0 * top * i as f64 / (grid.n_alpha - 1) as f64;
        let mut best = (0.0, a, 0.0);
        for j in 0..grid.n_beta {
            let b = TAU * j as f64 / grid.n_beta as f64;
            let hv = mean_curvature_of(f, a, b, grid.h, grid.richardson)?.abs();
            if hv > best.0 {
                best = (hv, a, b);
            }
        }
        Ok(best)
    });
    let mut best = (0.0, -top, 0.0);
    for r in rows {
        let r = r?;
        if r.0 > best.0 {
            best = r;
        }
    }
    Ok(SupReport {
        sup_abs_h: best.0,
        at: CurvatureSample {
            alpha: best.1,
            beta: best.2,
            h: grid.h,
        },
        grid: *grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimizers::{CanonicalField, Mode, PerturbedField};

    fn control() -> PerturbedField {
        PerturbedField::new(
            CanonicalField { k: 2, theta0: 0.0 },
            vec![Mode::new(0.4, 1, 0, FRAC_PI_2, 0.0)],
        )
    }

    #[test]
    fn partials_match_differences() {
        let f = control();
        let (a, b, h) = (0.4, 1.1, 1e-6);
        let g = |x: f64, y: f64| {
            let p = embed(x, y);
            let w = crate::sphere::field_vector_on_meridian(&f, x, y);
            super::super::sasaki_embedding(&p, &w)
        };
        let (_, _, ga, gb) = graph_partials(&f, a, b);
        assert!((ga - (g(a + h, b) - g(a - h, b)) / (2.0 * h)).norm() < 1e-8);
        assert!((gb - (g(a, b + h) - g(a, b - h)) / (2.0 * h)).norm() < 1e-8);
    }

    #[test]
    fn canonical_graph_is_minimal_at_origin() {
        assert!(mean_curvature(2, 0.0, 0.0, 1e-3).unwrap().abs() < 5e-3);
    }

    #[test]
    fn control_is_not_minimal() {
        let h = mean_curvature_of(&control(), 0.3, 0.5, 1e-3, true).unwrap();
        assert!(h.abs() > 1e-2, "H = {h}");
    }
}
