//! The canonical fields `v_k`, their closed-form volumes, and a descent
//! search over discretized fields of fixed winding.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::lower_bound;
use crate::par::map_indices;
use crate::quadrature::{composite_gauss, gauss_rule};
use crate::sphere::AngleField;

/// Phase for which `v_1` is `e2`.
pub const DEFAULT_PHASE: f64 = -FRAC_PI_2;

/// `θ = (k-1) β + θ0`: the angle turns at a constant rate along every
/// parallel, giving indices `k` at `N` and `2 - k` at `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalField {
    pub k: i64,
    pub theta0: f64,
}

pub fn canonical_field(k: i64, theta0: f64) -> Result<CanonicalField> {
    if k < 1 {
        return Err(Error::InvalidIndex {
            k,
            reason: "canonical fields exist for k >= 1",
        });
    }
    Ok(CanonicalField { k, theta0 })
}

impl AngleField for CanonicalField {
    fn theta(&self, _alpha: f64, beta: f64) -> f64 {
        (self.k - 1) as f64 * beta + self.theta0
    }
    fn winding(&self) -> i64 {
        self.k - 1
    }
    fn d_alpha(&self, _alpha: f64, _beta: f64) -> f64 {
        0.0
    }
    fn d_beta(&self, _alpha: f64, _beta: f64) -> f64 {
        (self.k - 1) as f64
    }
}

/// `amplitude · cos(n α - phase_alpha) · cos(m β - phase_beta)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub amplitude: f64,
    pub n: u32,
    pub m: u32,
    pub phase_alpha: f64,
    pub phase_beta: f64,
}

impl Mode {
    /// `amplitude · sin α · sin β` and friends.
    pub fn new(amplitude: f64, n: u32, m: u32, phase_alpha: f64, phase_beta: f64) -> Self {
        Self {
            amplitude,
            n,
            m,
            phase_alpha,
            phase_beta,
        }
    }

    fn value(&self, a: f64, b: f64) -> f64 {
        self.amplitude
            * (self.n as f64 * a - self.phase_alpha).cos()
            * (self.m as f64 * b - self.phase_beta).cos()
    }

    fn d_alpha(&self, a: f64, b: f64) -> f64 {
        let n = self.n as f64;
        -self.amplitude
            * n
            * (n * a - self.phase_alpha).sin()
            * (self.m as f64 * b - self.phase_beta).cos()
    }

    fn d_beta(&self, a: f64, b: f64) -> f64 {
        let m = self.m as f64;
        -self.amplitude
            * m
            * (self.n as f64 * a - self.phase_alpha).cos()
            * (m * b - self.phase_beta).sin()
    }
}

/// A canonical field plus periodic modes. The modes do not change the
/// winding, so both polar indices are those of `v_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedField {
    pub base: CanonicalField,
    pub modes: Vec<Mode>,
}

impl PerturbedField {
    pub fn new(base: CanonicalField, modes: Vec<Mode>) -> Self {
        Self { base, modes }
    }

    /// Three random low-frequency modes whose amplitudes sum to `amplitude`.
    pub fn random(k: i64, amplitude: f64, seed: u64) -> Result<Self> {
        let base = canonical_field(k, DEFAULT_PHASE)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.2..1.0));
        let total: f64 = weights.iter().sum();
        let modes = weights
            .iter()
            .map(|w| Mode {
                amplitude: amplitude * w / total,
                n: rng.random_range(0..=2),
                m: rng.random_range(0..=3),
                phase_alpha: rng.random_range(0.0..TAU),
                phase_beta: rng.random_range(0.0..TAU),
            })
            .collect();
        Ok(Self { base, modes })
    }
}

impl AngleField for PerturbedField {
    fn theta(&self, alpha: f64, beta: f64) -> f64 {
        self.base.theta(alpha, beta) + self.modes.iter().map(|m| m.value(alpha, beta)).sum::<f64>()
    }
    fn winding(&self) -> i64 {
        self.base.winding()
    }
    fn d_alpha(&self, alpha: f64, beta: f64) -> f64 {
        self.modes.iter().map(|m| m.d_alpha(alpha, beta)).sum()
    }
    fn d_beta(&self, alpha: f64, beta: f64) -> f64 {
        self.base.d_beta(alpha, beta) + self.modes.iter().map(|m| m.d_beta(alpha, beta)).sum::<f64>()
    }
}

/// `2π ∫_{-π/2}^{π/2} sqrt(1 + (k-1)² + 2(k-1) sin α) dα`, the volume of
/// `v_k` reduced to one dimension.
///
/// `1 + (k-1)² + 2(k-1) sin α = (k-2)² + 4(k-1) sin²(α/2 + π/4)`, so the
/// square root is analytic on the closed interval even for `k = 2`.
pub fn closed_form_volume(k: i64) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidIndex {
            k,
            reason: "canonical fields exist for k >= 1",
        });
    }
    let km1 = (k - 1) as f64;
    let integrand = |a: f64| {
        let s = (0.5 * a + FRAC_PI_4).sin();
        ((km1 - 1.0).powi(2) + 4.0 * km1 * s * s).sqrt()
    };
    let rule = gauss_rule(20);
    Ok(TAU * composite_gauss(&rule, 16, -FRAC_PI_2, FRAC_PI_2, &integrand))
}

/// Angles sampled on a latitude/longitude lattice that stops `cutoff` short
/// of each pole. One period is stored; column `n_beta` is column 0 shifted
/// by `2π · winding`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFile", into = "GridFile")]
pub struct GridField {
    n_alpha: usize,
    n_beta: usize,
    cutoff: f64,
    winding: i64,
    theta: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridFile {
    winding: i64,
    cutoff: f64,
    /// Rows of constant latitude from south to north.
    theta: Vec<Vec<f64>>,
}

impl TryFrom<GridFile> for GridField {
    type Error = Error;

    fn try_from(file: GridFile) -> Result<Self> {
        let n_alpha = file.theta.len();
        let n_beta = file.theta.first().map_or(0, Vec::len);
        if file.theta.iter().any(|row| row.len() != n_beta) {
            return Err(Error::InvalidConfig("grid rows have different lengths".into()));
        }
        let theta = file.theta.into_iter().flatten().collect();
        GridField::from_values(n_alpha, n_beta, file.cutoff, file.winding, theta)
    }
}

impl From<GridField> for GridFile {
    fn from(g: GridField) -> Self {
        GridFile {
            winding: g.winding,
            cutoff: g.cutoff,
            theta: g.theta.chunks(g.n_beta).map(<[f64]>::to_vec).collect(),
        }
    }
}

impl GridField {
    pub fn from_values(
        n_alpha: usize,
        n_beta: usize,
        cutoff: f64,
        winding: i64,
        theta: Vec<f64>,
    ) -> Result<Self> {
        if n_alpha < 4 || n_beta < 4 {
            return Err(Error::InvalidConfig("grid needs at least 4x4 nodes".into()));
        }
        if !(cutoff > 0.0 && cutoff < FRAC_PI_4) {
            return Err(Error::InvalidConfig("grid cutoff must lie in (0, pi/4)".into()));
        }
        if theta.len() != n_alpha * n_beta {
            return Err(Error::InvalidConfig(format!(
                "expected {} angles, got {}",
                n_alpha * n_beta,
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidConfig("grid angles must be finite".into()));
        }
        Ok(Self {
            n_alpha,
            n_beta,
            cutoff,
            winding,
            theta,
        })
    }

    /// Samples `f` at the lattice nodes.
    pub fn sample<F: AngleField + ?Sized>(
        f: &F,
        n_alpha: usize,
        n_beta: usize,
        cutoff: f64,
    ) -> Result<Self> {
        let mut g = Self::from_values(n_alpha, n_beta, cutoff, f.winding(), vec![0.0; n_alpha * n_beta])?;
        for i in 0..n_alpha {
            let a = g.alpha(i);
            for j in 0..n_beta {
                g.theta[i * n_beta + j] = f.theta(a, g.beta(j));
            }
        }
        Ok(g)
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn values(&self) -> &[f64] {
        &self.theta
    }

    pub fn d_alpha_step(&self) -> f64 {
        2.0 * (FRAC_PI_2 - self.cutoff) / (self.n_alpha - 1) as f64
    }

    pub fn d_beta_step(&self) -> f64 {
        TAU / self.n_beta as f64
    }

    pub fn alpha(&self, i: usize) -> f64 {
        -(FRAC_PI_2 - self.cutoff) + i as f64 * self.d_alpha_step()
    }

    pub fn beta(&self, j: usize) -> f64 {
        j as f64 * self.d_beta_step()
    }

    /// Node value with the winding jump applied for any column index.
    fn node(&self, i: usize, j: i64) -> f64 {
        let n = self.n_beta as i64;
        let wraps = j.div_euclid(n);
        let jj = j.rem_euclid(n) as usize;
        self.theta[i * self.n_beta + jj] + TAU * (self.winding * wraps) as f64
    }

    /// Catmull–Rom interpolation along a row at fractional column `x`.
    fn row_value(&self, i: usize, x: f64) -> f64 {
        let j = x.floor() as i64;
        let t = x - j as f64;
        catmull_rom(
            [
                self.node(i, j - 1),
                self.node(i, j),
                self.node(i, j + 1),
                self.node(i, j + 2),
            ],
            t,
        )
    }
}

fn catmull_rom(p: [f64; 4], t: f64) -> f64 {
    let [p0, p1, p2, p3] = p;
    p1 + 0.5
        * t
        * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)))
}

impl AngleField for GridField {
    /// Bicubic Catmull–Rom interpolation; latitudes beyond the lattice take
    /// the value of the nearest row.
    fn theta(&self, alpha: f64, beta: f64) -> f64 {
        let y = ((alpha - self.alpha(0)) / self.d_alpha_step()).clamp(0.0, (self.n_alpha - 1) as f64);
        let x = beta / self.d_beta_step();
        let i = (y.floor() as usize).min(self.n_alpha - 2);
        let t = y - i as f64;
        let row = |r: i64| self.row_value(r.clamp(0, self.n_alpha as i64 - 1) as usize, x);
        let i = i as i64;
        // extrapolate linearly past the first and last rows
        let r0 = if i == 0 { 2.0 * row(0) - row(1) } else { row(i - 1) };
        let r3 = if i + 2 >= self.n_alpha as i64 {
            2.0 * row(i + 1) - row(i)
        } else {
            row(i + 2)
        };
        catmull_rom([r0, row(i), row(i + 1), r3], t)
    }

    fn winding(&self) -> i64 {
        self.winding
    }
}

/// Cell-wise partial derivatives of the discrete volume.
struct CellTerms {
    energy: f64,
    d_theta_alpha: f64,
    d_theta_beta: f64,
}

/// Discrete volume: the weighted integrand at each cell midpoint, with
/// differences across the cell for the partials, times `Δα Δβ`. It covers
/// only `|α| ≤ π/2 - cutoff`.
pub fn discrete_volume(g: &GridField) -> f64 {
    discrete_volume_and_gradient(g).0
}

/// Discrete volume and its exact gradient with respect to the stored angles.
pub fn discrete_volume_and_gradient(g: &GridField) -> (f64, Vec<f64>) {
    let (na, nb) = (g.n_alpha, g.n_beta);
    let (da, db) = (g.d_alpha_step(), g.d_beta_step());
    let cell_area = da * db;
    let rows: Vec<Vec<CellTerms>> = map_indices(na - 1, |i| {
        let am = g.alpha(i) + 0.5 * da;
        let (sa, ca) = am.sin_cos();
        (0..nb as i64)
            .map(|j| {
                let t00 = g.node(i, j);
                let t01 = g.node(i, j + 1);
                let t10 = g.node(i + 1, j);
                let t11 = g.node(i + 1, j + 1);
                let ta = (t10 + t11 - t00 - t01) / (2.0 * da);
                let tb = (t01 + t11 - t00 - t10) / (2.0 * db);
                let s = sa + tb;
                let root = (ca * ca + s * s + ca * ca * ta * ta).sqrt();
                CellTerms {
                    energy: root * cell_area,
                    d_theta_alpha: ca * ca * ta / root * cell_area,
                    d_theta_beta: s / root * cell_area,
                }
            })
            .collect()
    });
    let energy: f64 = rows.iter().map(|r| r.iter().map(|c| c.energy).sum::<f64>()).sum();

    // each node gathers from the (up to) four cells it is a corner of
    let grad_rows: Vec<Vec<f64>> = map_indices(na, |i| {
        (0..nb)
            .map(|j| {
                let jm = (j + nb - 1) % nb;
                let mut acc = 0.0;
                // cells (ci, cj) with this node at corner (di, dj)
                for (ci, di) in [(i.wrapping_sub(1), 1usize), (i, 0usize)] {
                    if ci >= na - 1 {
                        continue;
                    }
                    for (cj, dj) in [(jm, 1usize), (j, 0usize)] {
                        let c = &rows[ci][cj];
                        let sa = if di == 1 { 1.0 } else { -1.0 };
                        let sb = if dj == 1 { 1.0 } else { -1.0 };
                        acc += sa * c.d_theta_alpha / (2.0 * da) + sb * c.d_theta_beta / (2.0 * db);
                    }
                }
                acc
            })
            .collect()
    });
    (energy, grad_rows.into_iter().flatten().collect())
}

/// Allowance for comparing the discrete volume with `π L(ξ_k)`: twice the
/// gap between the discrete volume of `v_k` sampled on the same lattice and
/// the exact bound. The gap is dominated by the two omitted polar caps.
pub fn discretization_tolerance(k: i64, n_alpha: usize, n_beta: usize, cutoff: f64) -> Result<f64> {
    let g = GridField::sample(&canonical_field(k, DEFAULT_PHASE)?, n_alpha, n_beta, cutoff)?;
    Ok(2.0 * (lower_bound(k)? - discrete_volume(&g)).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub max_iters: usize,
    /// Stop once the Euclidean norm of the gradient falls below this.
    pub grad_tol: f64,
    /// Sufficient-decrease constant of the backtracking line search.
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            grad_tol: 1e-8,
            armijo: 1e-4,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub field: GridField,
    /// Discrete volume before the first step and after every accepted step.
    pub trace: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub bound: f64,
    pub tol_disc: f64,
}

/// Gradient descent on [`discrete_volume`] with Barzilai–Borwein step
/// lengths safeguarded by Armijo backtracking. The winding is part of the
/// representation and cannot change.
pub fn optimize_field(k: i64, init: GridField, cfg: &OptimizeConfig) -> Result<OptimizeResult> {
    if 1 + init.winding.abs() != k {
        return Err(Error::InvalidIndex {
            k,
            reason: "initial grid field must have winding k - 1 or 1 - k",
        });
    }
    let bound = lower_bound(k)?;
    let tol_disc = discretization_tolerance(k, init.n_alpha, init.n_beta, init.cutoff)?;

    let mut field = init;
    let (mut energy, mut grad) = discrete_volume_and_gradient(&field);
    let mut trace = vec![energy];
    let mut step = 1.0 / norm(&grad).max(1e-300) * field.d_alpha_step();
    let mut iterations = 0;
    let mut gnorm = norm(&grad);

    while iterations < cfg.max_iters && gnorm > cfg.grad_tol {
        let g2 = gnorm * gnorm;
        let mut accepted = None;
        let mut s = step;
        for _ in 0..cfg.max_backtracks {
            let mut trial = field.clone();
            for (t, d) in trial.theta.iter_mut().zip(&grad) {
                *t -= s * d;
            }
            let (e, gr) = discrete_volume_and_gradient(&trial);
            if e <= energy - cfg.armijo * s * g2 {
                accepted = Some((trial, e, gr));
                break;
            }
            s *= 0.5;
        }
        let Some((trial, e, gr)) = accepted else {
            if energy - trace[trace.len().saturating_sub(2)].min(energy) > -1e-14 * energy
                && gnorm <= 1e3 * cfg.grad_tol
            {
                break;
            }
            return Err(Error::LineSearchStalled {
                iteration: iterations,
                objective: energy,
                gradient_norm: gnorm,
            });
        };
        // Barzilai–Borwein: s = |Δx|² / (Δx · Δg) with Δx = -s g
        let dg: f64 = gr.iter().zip(&grad).map(|(a, b)| (a - b) * b).sum();
        let bb = -s * g2 / dg;
        step = if bb.is_finite() && bb > 0.0 { bb } else { 2.0 * s };
        field = trial;
        energy = e;
        grad = gr;
        gnorm = norm(&grad);
        trace.push(energy);
        iterations += 1;
    }
    Ok(OptimizeResult {
        field,
        trace,
        gradient_norm: gnorm,
        iterations,
        converged: gnorm <= cfg.grad_tol,
        bound,
        tol_disc,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `π L(ξ_k)` as a function of `k`, for plotting.
pub fn bound_curve(k_max: i64) -> Result<Vec<(i64, f64)>> {
    (1..=k_max).map(|k| Ok((k, lower_bound(k)?))).collect()
}
