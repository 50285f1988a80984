use super::{east_direction, frame_at, north_direction, SphericalPoint, Vec3};
use crate::error::Result;

pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Second-order central difference of a scalar function.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// A unit vector field on the punctured sphere, represented by its angle
/// function `θ(α, β)`.
///
/// `θ(α, β + 2π) = θ(α, β) + 2π·winding` for every latitude. The Poincaré
/// index at the north pole is `1 + winding` and at the south pole
/// `1 - winding`.
///
/// Partial derivatives default to central differences with step
/// [`fd_step`](Self::fd_step); implementors with closed forms override them.
pub trait AngleField: Send + Sync {
    fn theta(&self, alpha: f64, beta: f64) -> f64;

    fn winding(&self) -> i64;

    fn fd_step(&self) -> f64 {
        DEFAULT_FD_STEP
    }

    /// `∂θ/∂α`
    fn d_alpha(&self, alpha: f64, beta: f64) -> f64 {
        central_difference(|a| self.theta(a, beta), alpha, self.fd_step())
    }

    /// `∂θ/∂β`
    fn d_beta(&self, alpha: f64, beta: f64) -> f64 {
        central_difference(|b| self.theta(alpha, b), beta, self.fd_step())
    }

    /// `θ1 = dθ(e1) = (1/cos α) ∂θ/∂β`
    fn theta1(&self, p: &SphericalPoint) -> f64 {
        self.d_beta(p.alpha(), p.beta()) / p.alpha().cos()
    }

    /// `θ2 = dθ(p × e1) = ∂θ/∂α`
    fn theta2(&self, p: &SphericalPoint) -> f64 {
        self.d_alpha(p.alpha(), p.beta())
    }
}

impl<T: AngleField + ?Sized> AngleField for &T {
    fn theta(&self, alpha: f64, beta: f64) -> f64 {
        (**self).theta(alpha, beta)
    }
    fn winding(&self) -> i64 {
        (**self).winding()
    }
    fn fd_step(&self) -> f64 {
        (**self).fd_step()
    }
    fn d_alpha(&self, alpha: f64, beta: f64) -> f64 {
        (**self).d_alpha(alpha, beta)
    }
    fn d_beta(&self, alpha: f64, beta: f64) -> f64 {
        (**self).d_beta(alpha, beta)
    }
}

impl<T: AngleField + ?Sized> AngleField for Box<T> {
    fn theta(&self, alpha: f64, beta: f64) -> f64 {
        (**self).theta(alpha, beta)
    }
    fn winding(&self) -> i64 {
        (**self).winding()
    }
    fn fd_step(&self) -> f64 {
        (**self).fd_step()
    }
    fn d_alpha(&self, alpha: f64, beta: f64) -> f64 {
        (**self).d_alpha(alpha, beta)
    }
    fn d_beta(&self, alpha: f64, beta: f64) -> f64 {
        (**self).d_beta(alpha, beta)
    }
}

/// Angle field from a closure; derivatives by central differences.
#[derive(Clone)]
pub struct FnField<F> {
    theta: F,
    winding: i64,
    step: f64,
}

impl<F> FnField<F>
where
    F: Fn(f64, f64) -> f64 + Send + Sync,
{
    pub fn new(winding: i64, theta: F) -> Self {
        Self {
            theta,
            winding,
            step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }
}

impl<F> AngleField for FnField<F>
where
    F: Fn(f64, f64) -> f64 + Send + Sync,
{
    fn theta(&self, alpha: f64, beta: f64) -> f64 {
        (self.theta)(alpha, beta)
    }
    fn winding(&self) -> i64 {
        self.winding
    }
    fn fd_step(&self) -> f64 {
        self.step
    }
}

/// `θ + c`: every vector rotated by the same angle inside its tangent plane.
#[derive(Debug, Clone)]
pub struct Phase<F> {
    pub inner: F,
    pub shift: f64,
}

impl<F: AngleField> AngleField for Phase<F> {
    fn theta(&self, alpha: f64, beta: f64) -> f64 {
        self.inner.theta(alpha, beta) + self.shift
    }
    fn winding(&self) -> i64 {
        self.inner.winding()
    }
    fn fd_step(&self) -> f64 {
        self.inner.fd_step()
    }
    fn d_alpha(&self, alpha: f64, beta: f64) -> f64 {
        self.inner.d_alpha(alpha, beta)
    }
    fn d_beta(&self, alpha: f64, beta: f64) -> f64 {
        self.inner.d_beta(alpha, beta)
    }
}

/// Push-forward under the rotation by `angle` about the polar axis.
///
/// The frame is equivariant under these rotations, so the angle function is
/// simply translated in longitude.
#[derive(Debug, Clone)]
pub struct Rotated<F> {
    pub inner: F,
    pub angle: f64,
}

impl<F: AngleField> AngleField for Rotated<F> {
    fn theta(&self, alpha: f64, beta: f64) -> f64 {
        self.inner.theta(alpha, beta - self.angle)
    }
    fn winding(&self) -> i64 {
        self.inner.winding()
    }
    fn fd_step(&self) -> f64 {
        self.inner.fd_step()
    }
    fn d_alpha(&self, alpha: f64, beta: f64) -> f64 {
        self.inner.d_alpha(alpha, beta - self.angle)
    }
    fn d_beta(&self, alpha: f64, beta: f64) -> f64 {
        self.inner.d_beta(alpha, beta - self.angle)
    }
}

/// Push-forward under the reflection `(x, y, z) ↦ (x, y, -z)`, which swaps
/// the poles. `e1` is preserved and `p × e1` reversed, so
/// `θ'(α, β) = -θ(-α, β)` and the winding changes sign.
#[derive(Debug, Clone)]
pub struct Mirrored<F>(pub F);

impl<F: AngleField> AngleField for Mirrored<F> {
    fn theta(&self, alpha: f64, beta: f64) -> f64 {
        -self.0.theta(-alpha, beta)
    }
    fn winding(&self) -> i64 {
        -self.0.winding()
    }
    fn fd_step(&self) -> f64 {
        self.0.fd_step()
    }
    fn d_alpha(&self, alpha: f64, beta: f64) -> f64 {
        self.0.d_alpha(-alpha, beta)
    }
    fn d_beta(&self, alpha: f64, beta: f64) -> f64 {
        -self.0.d_beta(-alpha, beta)
    }
}

/// The unit tangent vector `cos θ e1 + sin θ (p × e1)` at `p`.
pub fn field_vector<F: AngleField + ?Sized>(f: &F, p: &SphericalPoint) -> Result<Vec3> {
    let frame = frame_at(p)?;
    Ok(frame.at_angle(f.theta(p.alpha(), p.beta())))
}

/// Same vector written in coordinates, valid up to and including `|α| = π/2`
/// where it returns the limit along the meridian `β`.
pub fn field_vector_on_meridian<F: AngleField + ?Sized>(f: &F, alpha: f64, beta: f64) -> Vec3 {
    let (s, c) = f.theta(alpha, beta).sin_cos();
    east_direction(beta) * c + north_direction(alpha, beta) * s
}

/// Geodesic curvatures of the integral curves of `v` and of `v⊥ = p × v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvatures {
    pub gamma: f64,
    pub delta: f64,
}

/// `γ = cos θ (tan α + θ1) + sin θ θ2`, `δ = sin θ (tan α + θ1) - cos θ θ2`.
pub fn geodesic_curvatures<F: AngleField + ?Sized>(f: &F, p: &SphericalPoint) -> Curvatures {
    let (s, c) = f.theta(p.alpha(), p.beta()).sin_cos();
    let t = p.alpha().tan() + f.theta1(p);
    let t2 = f.theta2(p);
    Curvatures {
        gamma: c * t + s * t2,
        delta: s * t - c * t2,
    }
}

/// `sqrt(1 + (tan α + θ1)² + θ2²)`, the area density of the graph of the
/// field in the unit tangent bundle.
pub fn volume_integrand<F: AngleField + ?Sized>(f: &F, p: &SphericalPoint) -> f64 {
    let t = p.alpha().tan() + f.theta1(p);
    let t2 = f.theta2(p);
    (1.0 + t * t + t2 * t2).sqrt()
}

/// `volume_integrand · cos α`, written so that it stays finite at the poles:
/// `sqrt(cos²α + (sin α + ∂θ/∂β)² + cos²α (∂θ/∂α)²)`.
pub(crate) fn weighted_integrand<F: AngleField + ?Sized>(f: &F, alpha: f64, beta: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let tb = sa + f.d_beta(alpha, beta);
    let ta = ca * f.d_alpha(alpha, beta);
    (ca * ca + tb * tb + ta * ta).sqrt()
}
