//! Poincaré indices at the poles, the connection form along parallels, the
//! ellipse-length lower bound `vol ≥ π L(ξ_k)` and an audit of the chain of
//! inequalities that proves it.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::elliptic::ellipse_perimeter;
use crate::error::{Error, Result};
use crate::quadrature::{
    composite_gauss, gauss_rule, integrate_latitudes, integrate_sphere, volume, volume_estimate,
    QuadratureConfig, VolumeResult,
};
use crate::sphere::{field_vector_on_meridian, AngleField, Mirrored};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pole {
    North,
    South,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexConfig {
    /// Angular radius of the sampling circle around the pole.
    pub delta0: f64,
    pub n_samples: usize,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            delta0: 0.05,
            n_samples: 512,
        }
    }
}

impl IndexConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 8 {
            return Err(Error::InvalidConfig("n_samples must be at least 8".into()));
        }
        if !(self.delta0 > 0.0 && self.delta0 < FRAC_PI_2) {
            return Err(Error::InvalidConfig("delta0 must lie in (0, pi/2)".into()));
        }
        Ok(())
    }
}

/// Largest angle change between consecutive samples that is still
/// unwrapped without ambiguity.
pub const MAX_UNWRAP_GAP: f64 = FRAC_PI_2;

/// Winding number of the field around `pole`, measured in a stereographic
/// chart centred there with the orientation induced by the outward normal.
///
/// Near `N` the chart is `(x, y)/(1 + z)`. Near `S` it is `(x, -y)/(1 - z)`
/// traversed positively, which is the same as measuring the ordinary
/// `(x, y)/(1 - z)` chart with `β` increasing.
pub fn poincare_index<F: AngleField + ?Sized>(f: &F, pole: Pole, cfg: &IndexConfig) -> Result<i64> {
    cfg.validate()?;
    let n = cfg.n_samples;
    let (alpha, sign) = match pole {
        Pole::North => (FRAC_PI_2 - cfg.delta0, 1.0),
        Pole::South => (-FRAC_PI_2 + cfg.delta0, -1.0),
    };
    let chart_angle = |j: usize| -> f64 {
        let beta = TAU * j as f64 / n as f64;
        let p = crate::sphere::embed(alpha, beta);
        let v = field_vector_on_meridian(f, alpha, beta);
        let d = 1.0 + sign * p.z;
        // differential of (x, y) / (1 ± z)
        let dx = v.x / d - sign * p.x * v.z / (d * d);
        let dy = v.y / d - sign * p.y * v.z / (d * d);
        dy.atan2(dx)
    };
    let angles: Vec<f64> = (0..=n).map(chart_angle).collect();
    let mut total = 0.0;
    for (sample, w) in angles.windows(2).enumerate() {
        let gap = (w[1] - w[0] + PI).rem_euclid(TAU) - PI;
        if gap.abs() >= MAX_UNWRAP_GAP {
            return Err(Error::UnwrapAmbiguous { sample, gap });
        }
        total += gap;
    }
    let estimate = total / TAU;
    let rounded = estimate.round();
    let residual = (estimate - rounded).abs();
    if residual > 0.1 {
        return Err(Error::NonIntegerWinding { estimate, residual });
    }
    Ok(rounded as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub index_north: i64,
    pub index_south: i64,
    pub sup_index: i64,
    pub samples_used: usize,
}

/// Both polar indices; fails if they do not sum to the Euler characteristic 2.
pub fn index_report<F: AngleField + ?Sized>(f: &F, cfg: &IndexConfig) -> Result<IndexReport> {
    let north = poincare_index(f, Pole::North, cfg)?;
    let south = poincare_index(f, Pole::South, cfg)?;
    if north + south != 2 {
        return Err(Error::PoincareHopf { north, south });
    }
    Ok(IndexReport {
        index_north: north,
        index_south: south,
        sup_index: north.max(south),
        samples_used: 2 * cfg.n_samples,
    })
}

const PULLBACK_NODES: usize = 512;

/// `∮ i*ω12` over the parallel at latitude `alpha`, i.e.
/// `∫₀^{2π} (tan α + θ1) cos α dβ = ∫₀^{2π} (sin α + ∂θ/∂β) dβ`.
pub fn connection_pullback_integral<F: AngleField + ?Sized>(f: &F, alpha: f64) -> f64 {
    connection_pullback_with(f, alpha, PULLBACK_NODES)
}

pub fn connection_pullback_with<F: AngleField + ?Sized>(f: &F, alpha: f64, n_beta: usize) -> f64 {
    let h = TAU / n_beta as f64;
    let sa = alpha.sin();
    (0..n_beta)
        .map(|j| sa + f.d_beta(alpha, j as f64 * h))
        .sum::<f64>()
        * h
}

/// `∫∫ ω1 ∧ ω2` over the cap north of `alpha`, by direct quadrature of the
/// area form (the Gauss curvature is 1).
pub fn cap_curvature_integral(alpha: f64) -> f64 {
    let rule = gauss_rule(16);
    TAU * composite_gauss(&rule, 8, alpha, FRAC_PI_2, &|a: f64| a.cos())
}

fn check_k(k: i64) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidIndex {
            k,
            reason: "the index bound needs k >= 1",
        });
    }
    Ok(())
}

/// Integrand of `L(ξ_k)`.
fn ellipse_speed(k: f64, t: f64) -> f64 {
    let s = t.sin();
    ((k - 2.0).powi(2) + 4.0 * (k - 1.0) * s * s).sqrt()
}

/// `L(ξ_k) = ∫₀^{2π} sqrt((k-2)² + 4(k-1) sin²t) dt`.
///
/// The integrand has period `π` and is even, so the integral is four times
/// the quarter period, evaluated by Romberg extrapolation of the trapezoid
/// rule. The quarter period is smooth even for `k = 2` where the full
/// integrand `2|sin t|` has kinks.
pub fn ellipse_length(k: i64) -> Result<f64> {
    check_k(k)?;
    Ok(4.0 * romberg(|t| ellipse_speed(k as f64, t), 0.0, FRAC_PI_2, 1e-15))
}

/// Perimeter of the ellipse with semi-axes `k` and `|k - 2|` via the
/// arithmetic-geometric mean; an independent route to [`ellipse_length`].
pub fn ellipse_length_agm(k: i64) -> Result<f64> {
    check_k(k)?;
    Ok(ellipse_perimeter(k as f64, (k - 2) as f64))
}

/// `π L(ξ_k)`.
pub fn lower_bound(k: i64) -> Result<f64> {
    Ok(PI * ellipse_length(k)?)
}

fn romberg(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    const LEVELS: usize = 24;
    let mut prev = vec![0.5 * (b - a) * (f(a) + f(b))];
    let mut n = 1usize;
    for _ in 1..LEVELS {
        let h = (b - a) / (2 * n) as f64;
        let mid: f64 = (0..n).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
        let mut row = vec![0.5 * prev[0] + h * mid];
        let mut factor = 1.0;
        for j in 1..=prev.len() {
            factor *= 4.0;
            let r = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
            row.push(r);
        }
        n *= 2;
        let (last, before) = (row[row.len() - 1], prev[prev.len() - 1]);
        if (last - before).abs() <= rel_tol * last.abs() {
            return last;
        }
        prev = row;
    }
    prev[prev.len() - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub volume: f64,
    pub error_estimate: f64,
    pub k: i64,
    pub bound: f64,
    pub margin: f64,
    pub violation: bool,
    /// The bound is only claimed for `k > 2`; smaller `k` are checked as an
    /// extension.
    pub beyond_stated_hypothesis: bool,
}

/// Compare the volume of `f` with `π L(ξ_k)` for its larger polar index.
pub fn verify_bound<F: AngleField + ?Sized>(
    f: &F,
    cfg: &QuadratureConfig,
    index_cfg: &IndexConfig,
) -> Result<BoundReport> {
    let k = index_report(f, index_cfg)?.sup_index;
    let vol = volume(f, cfg)?;
    bound_report(&vol, k, cfg.rel_tol)
}

pub fn bound_report(vol: &VolumeResult, k: i64, rel_tol: f64) -> Result<BoundReport> {
    let bound = lower_bound(k)?;
    let margin = vol.value - bound;
    Ok(BoundReport {
        volume: vol.value,
        error_estimate: vol.error_estimate,
        k,
        bound,
        margin,
        violation: margin < -(vol.error_estimate + rel_tol * bound),
        beyond_stated_hypothesis: k <= 2,
    })
}

/// How the auxiliary angle of the proof treats the sign of `tan α + θ1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainVariant {
    /// `φ_k = arctan|tan α + (k-1)/cos α|` and the absolute value of the
    /// parallel integral, so every link holds for `k = 1` too.
    #[default]
    Absolute,
    /// `φ_k = arctan(tan α + (k-1)/cos α)` with the signed parallel integral.
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditChain {
    pub k: i64,
    pub variant: ChainVariant,
    /// The field was reflected through the equator so that the larger index
    /// sits at the north pole.
    pub relabeled: bool,
    /// Full volume, `θ2` dropped, auxiliary-angle form, parallel integral
    /// substituted, `π L(ξ_k)`.
    pub values: [f64; 5],
    pub error_estimates: [f64; 5],
    pub tolerance: f64,
}

impl AuditChain {
    /// First link `i → i+1` with `values[i+1] > values[i] + tolerance`.
    pub fn first_violation(&self) -> Option<usize> {
        (0..4).find(|&i| self.values[i + 1] > self.values[i] + self.tolerance)
    }

    pub fn is_monotone(&self) -> bool {
        self.first_violation().is_none()
    }

    /// Largest spread between the five values.
    pub fn spread(&self) -> f64 {
        let max = self.values.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.values.iter().cloned().fold(f64::MAX, f64::min);
        max - min
    }
}

/// The five quantities of the proof of the bound, failing with
/// [`Error::ChainViolation`] at the first increasing link.
pub fn audit_chain<F: AngleField + ?Sized>(
    f: &F,
    k: i64,
    cfg: &QuadratureConfig,
    variant: ChainVariant,
) -> Result<AuditChain> {
    let chain = chain_values(f, k, cfg, variant)?;
    match chain.first_violation() {
        None => Ok(chain),
        Some(link) => Err(Error::ChainViolation {
            link: link + 1,
            upper: chain.values[link],
            lower: chain.values[link + 1],
            tolerance: chain.tolerance,
            values: chain.values,
        }),
    }
}

/// [`audit_chain`] without the monotonicity check.
pub fn chain_values<F: AngleField + ?Sized>(
    f: &F,
    k: i64,
    cfg: &QuadratureConfig,
    variant: ChainVariant,
) -> Result<AuditChain> {
    check_k(k)?;
    let w = f.winding();
    if 1 + w.abs() != k {
        return Err(Error::InvalidIndex {
            k,
            reason: "k must be the larger polar index of the field",
        });
    }
    if w < 0 {
        let mut chain = chain_north(&Mirrored(f), k, cfg, variant)?;
        chain.relabeled = true;
        Ok(chain)
    } else {
        chain_north(f, k, cfg, variant)
    }
}

fn chain_north<F: AngleField + ?Sized>(
    f: &F,
    k: i64,
    cfg: &QuadratureConfig,
    variant: ChainVariant,
) -> Result<AuditChain> {
    let km1 = (k - 1) as f64;
    let phi = move |alpha: f64| -> f64 {
        let x = alpha.tan() + km1 / alpha.cos();
        match variant {
            ChainVariant::Absolute => x.abs().atan(),
            ChainVariant::AsPrinted => x.atan(),
        }
    };

    let full = volume_estimate(f, cfg)?;
    let dropped = integrate_sphere(cfg, |a, b| {
        let (sa, ca) = a.sin_cos();
        (ca * ca + (sa + f.d_beta(a, b)).powi(2)).sqrt()
    })?;
    let angled = integrate_sphere(cfg, |a, b| {
        let (sp, cp) = phi(a).sin_cos();
        cp * a.cos() + sp * (a.sin() + f.d_beta(a, b)).abs()
    })?;
    let n_beta = cfg.n_beta;
    let stokes = integrate_latitudes(cfg, |a| {
        let (sp, cp) = phi(a).sin_cos();
        let loop_integral = connection_pullback_with(f, a, n_beta);
        let loop_term = match variant {
            ChainVariant::Absolute => loop_integral.abs(),
            ChainVariant::AsPrinted => loop_integral,
        };
        TAU * cp * a.cos() + sp * loop_term
    })?;
    let bound = lower_bound(k)?;

    let values = [full.value, dropped.value, angled.value, stokes.value, bound];
    let error_estimates = [
        full.error_estimate,
        dropped.error_estimate,
        angled.error_estimate,
        stokes.error_estimate,
        0.0,
    ];
    let tolerance = error_estimates.iter().sum::<f64>() + cfg.rel_tol * bound;
    Ok(AuditChain {
        k,
        variant,
        relabeled: false,
        values,
        error_estimates,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::FnField;
    use approx::assert_relative_eq;

    fn canonical(k: i64) -> impl AngleField {
        let w = k - 1;
        FnField::new(w, move |_, b| w as f64 * b - FRAC_PI_2)
    }

    #[test]
    fn indices_of_canonical_fields() {
        let cfg = IndexConfig::default();
        for k in 1..=6 {
            let r = index_report(&canonical(k), &cfg).unwrap();
            assert_eq!((r.index_north, r.index_south), (k, 2 - k), "k = {k}");
            assert_eq!(r.sup_index, k.max(2 - k));
        }
    }

    #[test]
    fn coarse_sampling_is_ambiguous() {
        let cfg = IndexConfig {
            n_samples: 8,
            ..IndexConfig::default()
        };
        let err = poincare_index(&canonical(6), Pole::North, &cfg).unwrap_err();
        assert!(matches!(err, Error::UnwrapAmbiguous { .. }));
    }

    #[test]
    fn pullback_examples() {
        assert!(connection_pullback_integral(&canonical(1), 0.0).abs() < 1e-12);
        assert_relative_eq!(
            connection_pullback_integral(&canonical(2), PI / 6.0),
            3.0 * PI,
            max_relative = 1e-10
        );
    }

    #[test]
    fn cap_area() {
        assert_relative_eq!(cap_curvature_integral(0.0), TAU, max_relative = 1e-14);
        assert_relative_eq!(cap_curvature_integral(-FRAC_PI_2), 2.0 * TAU, max_relative = 1e-14);
    }

    #[test]
    fn ellipse_anchors() {
        assert_relative_eq!(ellipse_length(1).unwrap(), TAU, max_relative = 1e-14);
        assert_relative_eq!(ellipse_length(2).unwrap(), 8.0, max_relative = 1e-14);
        // ∫₀^{2π} sqrt(1 + 8 sin²t) dt, 30-digit reference
        assert_relative_eq!(ellipse_length(3).unwrap(), 13.364_893_220_555_258, max_relative = 1e-14);
        assert_relative_eq!(lower_bound(1).unwrap(), 2.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(lower_bound(2).unwrap(), 8.0 * PI, max_relative = 1e-14);
        assert!(ellipse_length(0).is_err());
    }

    #[test]
    fn canonical_chain_is_tight() {
        let cfg = QuadratureConfig::default();
        for k in 1..=4 {
            let chain = audit_chain(&canonical(k), k, &cfg, ChainVariant::Absolute).unwrap();
            assert!(chain.spread() <= chain.tolerance, "k = {k}: {chain:?}");
        }
    }

    #[test]
    fn printed_chain_breaks_for_k1() {
        let cfg = QuadratureConfig::default();
        let err = audit_chain(&canonical(1), 1, &cfg, ChainVariant::AsPrinted).unwrap_err();
        match err {
            Error::ChainViolation { link, upper, lower, .. } => {
                assert_eq!(link, 3);
                assert_relative_eq!(upper, PI * PI, max_relative = 1e-6);
                assert_relative_eq!(lower, 2.0 * PI * PI, max_relative = 1e-6);
            }
            other => panic!("unexpected {other:?}"),
        }
        for k in 2..=4 {
            audit_chain(&canonical(k), k, &cfg, ChainVariant::AsPrinted).unwrap();
        }
    }

    #[test]
    fn wrong_k_is_rejected() {
        let cfg = QuadratureConfig::default();
        assert!(matches!(
            chain_values(&canonical(3), 2, &cfg, ChainVariant::Absolute),
            Err(Error::InvalidIndex { .. })
        ));
    }
}
