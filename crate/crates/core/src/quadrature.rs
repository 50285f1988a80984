//! Improper surface integrals over the punctured sphere.
//!
//! The integrand is sampled on a tensor grid: composite Gauss–Legendre in
//! latitude over `|α| ≤ π/2 − ε`, periodic trapezoid in longitude. The
//! cut-off `ε` runs through a decreasing sequence and the results are
//! extrapolated to `ε = 0` by polynomial (Richardson/Neville) extrapolation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::map_indices;
use crate::sphere::{field::weighted_integrand, AngleField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Number of Gauss–Legendre panels in latitude.
    pub n_alpha: usize,
    /// Nodes per latitude panel.
    pub gauss_order: usize,
    /// Trapezoid nodes in longitude.
    pub n_beta: usize,
    /// Pole cut-offs `ε`, strictly decreasing, each below `π/4`.
    pub cutoff_sequence: Vec<f64>,
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n_alpha: 24,
            gauss_order: 8,
            n_beta: 128,
            cutoff_sequence: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
            rel_tol: 1e-6,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.n_alpha == 0 || self.gauss_order == 0 || self.n_beta == 0 {
            return bad("grid sizes must be positive");
        }
        if self.cutoff_sequence.is_empty() {
            return bad("cutoff_sequence is empty");
        }
        if self
            .cutoff_sequence
            .iter()
            .any(|&e| !(e > 0.0 && e < FRAC_PI_4))
        {
            return bad("every cut-off must lie in (0, pi/4)");
        }
        if self.cutoff_sequence.windows(2).any(|w| w[1] >= w[0]) {
            return bad("cutoff_sequence must be strictly decreasing");
        }
        if !(self.rel_tol > 0.0) {
            return bad("rel_tol must be positive");
        }
        Ok(())
    }

    /// The smallest cut-off actually integrated.
    pub fn pole_cutoff(&self) -> f64 {
        *self.cutoff_sequence.last().expect("validated config")
    }

    /// Same config with every grid dimension doubled.
    pub fn refined(&self) -> Self {
        Self {
            n_alpha: self.n_alpha * 2,
            n_beta: self.n_beta * 2,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeResult {
    pub value: f64,
    /// Cut-off extrapolation error plus grid resolution error.
    pub error_estimate: f64,
    /// Grid part of the estimate, taken at the finest cut-off.
    pub resolution_error: f64,
    pub converged: bool,
    /// `(ε, integral over |α| ≤ π/2 − ε)`
    pub per_cutoff: Vec<(f64, f64)>,
}

/// `4π`: the area of the sphere, a lower bound for every field's volume
/// since the integrand is at least one.
pub fn volume_lower_floor() -> f64 {
    4.0 * PI
}

/// Volume of the graph of `f`; fails with [`Error::NotConverged`] when the
/// cut-off extrapolation does not settle to `rel_tol`.
pub fn volume<F: AngleField + ?Sized>(f: &F, cfg: &QuadratureConfig) -> Result<VolumeResult> {
    require_converged(volume_estimate(f, cfg)?, cfg.rel_tol)
}

/// [`volume`] without the convergence check.
pub fn volume_estimate<F: AngleField + ?Sized>(
    f: &F,
    cfg: &QuadratureConfig,
) -> Result<VolumeResult> {
    integrate_sphere(cfg, |a, b| weighted_integrand(f, a, b))
}

pub(crate) fn require_converged(r: VolumeResult, rel_tol: f64) -> Result<VolumeResult> {
    if r.converged {
        Ok(r)
    } else {
        Err(Error::NotConverged {
            result: Box::new(r),
            rel_tol,
        })
    }
}

/// `∫∫ g(α, β) dβ dα` where `g` already includes the `cos α` area factor.
pub fn integrate_sphere<G>(cfg: &QuadratureConfig, g: G) -> Result<VolumeResult>
where
    G: Fn(f64, f64) -> f64 + Sync + Send,
{
    cfg.validate()?;
    let n_beta = cfg.n_beta;
    let dbeta = TAU / n_beta as f64;
    let row = |alpha: f64, offset: f64| -> f64 {
        (0..n_beta).map(|j| g(alpha, (j as f64 + offset) * dbeta)).sum::<f64>() * dbeta
    };
    integrate_latitudes_unchecked(cfg, |a| row(a, 0.0), Some(&|a: f64| row(a, 0.5)))
}

/// `∫ g(α) dα` over the latitudes with the same cut-off extrapolation.
pub fn integrate_latitudes<G>(cfg: &QuadratureConfig, g: G) -> Result<VolumeResult>
where
    G: Fn(f64) -> f64 + Sync + Send,
{
    cfg.validate()?;
    integrate_latitudes_unchecked(cfg, g, None::<&fn(f64) -> f64>)
}

/// `shifted`, if given, is the row integral on the row grid moved by half a
/// step. It is only evaluated at the finest cut-off.
fn integrate_latitudes_unchecked<G, S>(cfg: &QuadratureConfig, g: G, shifted: Option<&S>) -> Result<VolumeResult>
where
    G: Fn(f64) -> f64 + Sync + Send,
    S: Fn(f64) -> f64 + Sync + Send,
{
    let rule = gauss_rule(cfg.gauss_order);
    let span = |eps: f64| (-FRAC_PI_2 + eps, FRAC_PI_2 - eps);
    let mut per_cutoff = Vec::with_capacity(cfg.cutoff_sequence.len());
    let mut finest = 0.0;
    for &eps in &cfg.cutoff_sequence {
        let (a, b) = span(eps);
        finest = composite_gauss(&rule, cfg.n_alpha, a, b, &g);
        per_cutoff.push((eps, finest));
    }
    let (a, b) = span(cfg.pole_cutoff());
    let half_panels = if cfg.n_alpha >= 2 {
        composite_gauss(&rule, cfg.n_alpha / 2, a, b, &g)
    } else {
        finest
    };
    // the shifted rows interleave with the plain ones into a rule of twice
    // the resolution, so half their difference is the error left in `finest`
    let row_error = shifted.map_or(0.0, |s| 0.5 * (finest - composite_gauss(&rule, cfg.n_alpha, a, b, s)).abs());
    // halving a second-order grid changes the result by three times its error
    let resolution = row_error + (finest - half_panels).abs() / 3.0;
    Ok(finish(per_cutoff, resolution, cfg.rel_tol))
}

pub(crate) fn gauss_rule(order: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(order).expect("order is positive");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels. Nodes
/// are evaluated in parallel; the sum runs in a fixed order.
pub(crate) fn composite_gauss<G>(rule: &[(f64, f64)], panels: usize, a: f64, b: f64, g: &G) -> f64
where
    G: Fn(f64) -> f64 + Sync + Send,
{
    let h = (b - a) / panels as f64;
    let m = rule.len();
    let values = map_indices(panels * m, |idx| {
        let (panel, node) = (idx / m, idx % m);
        let (x, w) = rule[node];
        let mid = a + (panel as f64 + 0.5) * h;
        w * g(mid + 0.5 * h * x)
    });
    values.iter().sum::<f64>() * 0.5 * h
}

/// Polynomial extrapolation to `x = 0` through all points (Neville).
pub fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    let mut p: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (points[i].0, points[i + level].0);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

fn finish(per_cutoff: Vec<(f64, f64)>, resolution_error: f64, rel_tol: f64) -> VolumeResult {
    let value = extrapolate_to_zero(&per_cutoff);
    let lower = if per_cutoff.len() > 1 {
        extrapolate_to_zero(&per_cutoff[1..])
    } else {
        // a single cut-off carries no information about the tail
        per_cutoff[0].1 * (1.0 + rel_tol * 10.0)
    };
    let error_estimate =
        (value - lower).abs() + resolution_error + 64.0 * f64::EPSILON * value.abs();
    let converged = value.is_finite() && error_estimate <= rel_tol * value.abs();
    VolumeResult {
        value,
        error_estimate,
        resolution_error,
        converged,
        per_cutoff,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::FnField;
    use approx::assert_relative_eq;

    #[test]
    fn neville_recovers_polynomials() {
        let pts: Vec<_> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|&x| (x, 3.0 - 2.0 * x + 0.5 * x * x - x * x * x))
            .collect();
        assert_relative_eq!(extrapolate_to_zero(&pts), 3.0, epsilon = 1e-13);
    }

    #[test]
    fn sphere_area() {
        let cfg = QuadratureConfig::default();
        let r = integrate_sphere(&cfg, |a, _| a.cos()).unwrap();
        // the cubic extrapolant leaves a residual of order ε⁴
        assert_relative_eq!(r.value, volume_lower_floor(), max_relative = 1e-10);
        assert!(r.converged);
    }

    #[test]
    fn v1_volume_is_two_pi_squared() {
        let f = FnField::new(0, |_, _| -FRAC_PI_2);
        let r = volume(&f, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(r.value, 2.0 * PI * PI, max_relative = 1e-10);
        assert!(r.value + r.error_estimate >= volume_lower_floor());
    }

    #[test]
    fn config_validation() {
        let mut cfg = QuadratureConfig {
            cutoff_sequence: vec![1e-2, 1e-2],
            ..QuadratureConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.cutoff_sequence = vec![0.9];
        assert!(cfg.validate().is_err());
        cfg.cutoff_sequence = vec![1e-2];
        cfg.rel_tol = 0.0;
        assert!(cfg.validate().is_err());
        cfg.rel_tol = 1e-6;
        cfg.n_beta = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn not_converged_is_reported() {
        // integrand ~ 1/sqrt(cos α) near the poles: the cut-off tail
        // behaves like sqrt(ε), which polynomial extrapolation cannot remove
        let f = FnField::new(0, |a: f64, b: f64| b.cos() * (a.cos().max(1e-300)).ln());
        let cfg = QuadratureConfig {
            rel_tol: 1e-9,
            ..QuadratureConfig::default()
        };
        match volume(&f, &cfg) {
            Err(Error::NotConverged { result, .. }) => assert!(!result.converged),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }
}
