use thiserror::Error;

use crate::quadrature::VolumeResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("latitude {alpha} is outside the open interval (-pi/2, pi/2)")]
    InvalidLatitude { alpha: f64 },

    #[error("point at latitude {alpha} is too close to a pole (|cos alpha| = {cos_alpha:e})")]
    PoleProximity { alpha: f64, cos_alpha: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("improper integral did not converge: error estimate {error:e} exceeds rel_tol {rel_tol:e} (value {value})", value = .result.value, error = .result.error_estimate)]
    NotConverged { result: Box<VolumeResult>, rel_tol: f64 },

    #[error("phase unwrapping is ambiguous: consecutive angle gap {gap:.3} rad at sample {sample}; raise n_samples")]
    UnwrapAmbiguous { sample: usize, gap: f64 },

    #[error("winding estimate {estimate} is not close to an integer (residual {residual:.3})")]
    NonIntegerWinding { estimate: f64, residual: f64 },

    #[error("Poincare-Hopf violated: index_north + index_south = {north} + {south} != 2")]
    PoincareHopf { north: i64, south: i64 },

    #[error("audit chain is not monotone at link {link} -> {}: {upper} < {lower} beyond tolerance {tolerance:e}", .link + 1)]
    ChainViolation {
        link: usize,
        upper: f64,
        lower: f64,
        tolerance: f64,
        values: [f64; 5],
    },

    #[error("line search stalled after {iteration} iterations (objective {objective}, gradient norm {gradient_norm:e})")]
    LineSearchStalled {
        iteration: usize,
        objective: f64,
        gradient_norm: f64,
    },

    #[error("degenerate first fundamental form (det g = {det:e}) at alpha={alpha}, beta={beta}")]
    DegenerateMetric { alpha: f64, beta: f64, det: f64 },

    #[error("k = {k} is not admissible here: {reason}")]
    InvalidIndex { k: i64, reason: &'static str },

    #[error("bundle point violates |p| = |w| = 1, p.w = 0 (residual {residual:e})")]
    NotOnBundle { residual: f64 },

    #[error("tangent vector X with |X| = {norm} is outside the open disk of radius pi/2")]
    OutsideChart { norm: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
