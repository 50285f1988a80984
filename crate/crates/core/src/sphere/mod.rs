//! The punctured unit sphere `S² \ {N, S}` in latitude/longitude coordinates
//! and the global orthonormal frame used throughout the crate.
//!
//! A point is `p(α, β) = (cos α cos β, cos α sin β, sin α)` with the poles
//! `N = (0, 0, 1)` and `S = (0, 0, -1)` removed. The frame is
//!
//! ```text
//! e1(p) = (-y, x, 0) / ρ                  (along the parallel, eastward)
//! e2(p) = (xz/ρ, yz/ρ, -ρ),  ρ = √(x²+y²)  (along the meridian, southward)
//! ```
//!
//! which satisfies `e1 × e2 = -p`. Unit vector fields are stored as angles
//! measured counterclockwise about the outward normal starting at `e1`,
//! i.e. `v = cos θ e1 + sin θ (p × e1)` where `p × e1 = -e2` points north.

pub(crate) mod field;

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub use field::{
    central_difference, field_vector, field_vector_on_meridian, geodesic_curvatures,
    volume_integrand, AngleField, Curvatures, FnField, Mirrored, Phase, Rotated,
    DEFAULT_FD_STEP,
};

pub type Vec3 = Vector3<f64>;

/// Points closer than this (in `|cos α|`) to a pole have no usable frame.
pub const POLE_GUARD: f64 = 1e-9;

pub const NORTH: Vec3 = Vec3::new(0.0, 0.0, 1.0);
pub const SOUTH: Vec3 = Vec3::new(0.0, 0.0, -1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    alpha: f64,
    beta: f64,
}

impl SphericalPoint {
    /// Longitude is reduced into `[0, 2π)`; the latitude must lie strictly
    /// inside `(-π/2, π/2)`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || alpha.abs() >= FRAC_PI_2 {
            return Err(Error::InvalidLatitude { alpha });
        }
        Ok(Self {
            alpha,
            beta: beta.rem_euclid(TAU),
        })
    }

    pub fn from_cartesian(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidLatitude { alpha: f64::NAN });
        }
        let u = v / n;
        let alpha = u.z.clamp(-1.0, 1.0).asin();
        let beta = u.y.atan2(u.x);
        Self::new(alpha, beta)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn embed(&self) -> Vec3 {
        embed(self.alpha, self.beta)
    }
}

/// `p(α, β)` without the pole check; valid for `|α| ≤ π/2`.
pub fn embed(alpha: f64, beta: f64) -> Vec3 {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    Vec3::new(ca * cb, ca * sb, sa)
}

/// `∂p/∂α`, the unit northward meridian direction (equal to `-e2`).
pub fn north_direction(alpha: f64, beta: f64) -> Vec3 {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    Vec3::new(-sa * cb, -sa * sb, ca)
}

/// Unit eastward direction along the parallel (`e1`); depends on `β` only.
pub fn east_direction(beta: f64) -> Vec3 {
    let (sb, cb) = beta.sin_cos();
    Vec3::new(-sb, cb, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e1: Vec3,
    pub e2: Vec3,
}

impl Frame {
    /// The counterclockwise rotation of `e1` by a right angle, `p × e1 = -e2`.
    pub fn rotated_e1(&self) -> Vec3 {
        -self.e2
    }

    /// Unit vector at counterclockwise angle `theta` from `e1`.
    pub fn at_angle(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.e1 * c - self.e2 * s
    }
}

/// The frame `{e1, e2}` from the Cartesian formulas, evaluated at `p`.
pub fn frame_at(p: &SphericalPoint) -> Result<Frame> {
    let v = p.embed();
    let rho = (v.x * v.x + v.y * v.y).sqrt();
    if rho < POLE_GUARD {
        return Err(Error::PoleProximity {
            alpha: p.alpha(),
            cos_alpha: rho,
        });
    }
    Ok(Frame {
        e1: Vec3::new(-v.y, v.x, 0.0) / rho,
        e2: Vec3::new(v.x * v.z / rho, v.y * v.z / rho, -rho),
    })
}
