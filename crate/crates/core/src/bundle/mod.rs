//! The unit tangent bundle `T¹S² = {(p, w) : |p| = |w| = 1, p·w = 0}`,
//! parallel transport from the north pole, and the surfaces traced by the
//! canonical fields.
//!
//! Metric quantities use the map `(p, w) ↦ (p, w, p × w)/√2 ∈ R⁹`, which is
//! an isometric embedding of `T¹S²` with its Sasaki metric.

mod curvature;
mod mesh;
mod moebius;

use std::f64::consts::FRAC_PI_2;

use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{east_direction, frame_at, north_direction, SphericalPoint, Vec3, NORTH};

pub use curvature::{
    mean_curvature, mean_curvature_of, sup_abs_mean_curvature, CurvatureGrid, CurvatureSample,
    SupReport, DEFAULT_COLLAR,
};
pub use mesh::{
    flat_square_mesh, graph_surface_mesh, Ambient, Orientability, SurfaceMesh, MESH_SIDECAR_VERSION,
};
pub use moebius::{
    hemisphere_closure_check, immersion_rank_check, moebius_mesh, moebius_point,
    ruled_decomposition_check, ClosureReport, ImmersionReport, RuledReport, SampleFailure,
    RULED_OVERLAP_WITNESS,
};

pub type Vec9 = SVector<f64, 9>;

/// Tolerance on the bundle constraints.
pub const BUNDLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundlePoint {
    pub p: Vec3,
    pub w: Vec3,
}

impl BundlePoint {
    pub fn new(p: Vec3, w: Vec3) -> Result<Self> {
        let b = Self { p, w };
        let residual = b.residual();
        if !(residual <= BUNDLE_TOL) {
            return Err(Error::NotOnBundle { residual });
        }
        Ok(b)
    }

    /// Largest violation of `|p| = 1`, `|w| = 1`, `p·w = 0`.
    pub fn residual(&self) -> f64 {
        (self.p.norm() - 1.0)
            .abs()
            .max((self.w.norm() - 1.0).abs())
            .max(self.p.dot(&self.w).abs())
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.p.x, self.p.y, self.p.z, self.w.x, self.w.y, self.w.z]
    }

    pub fn sasaki(&self) -> Vec9 {
        sasaki_embedding(&self.p, &self.w)
    }
}

/// `(p, w, p × w)/√2`
pub fn sasaki_embedding(p: &Vec3, w: &Vec3) -> Vec9 {
    let c = p.cross(w);
    Vec9::from_column_slice(&[p.x, p.y, p.z, w.x, w.y, w.z, c.x, c.y, c.z])
        * std::f64::consts::FRAC_1_SQRT_2
}

/// Image of the tangent vector `(ṗ, ẇ)` at `(p, w)` under the embedding.
pub fn sasaki_differential(p: &Vec3, w: &Vec3, dp: &Vec3, dw: &Vec3) -> Vec9 {
    let c = dp.cross(w) + p.cross(dw);
    Vec9::from_column_slice(&[dp.x, dp.y, dp.z, dw.x, dw.y, dw.z, c.x, c.y, c.z])
        * std::f64::consts::FRAC_1_SQRT_2
}

/// A basis of the tangent space of `T¹S²` at `(p, w)`, as vectors of R⁹:
/// horizontal along `w`, horizontal along `p × w`, and vertical.
pub fn tangent_basis(p: &Vec3, w: &Vec3) -> [Vec9; 3] {
    let n = p.cross(w);
    let zero = Vec3::zeros();
    [
        sasaki_differential(p, w, w, &-p),
        sasaki_differential(p, w, &n, &zero),
        sasaki_differential(p, w, &zero, &n),
    ]
}

/// `u1(N)` and `u2(N)`: the frame at the north pole that parallel
/// transport carries to `(e1, e2)` at `(1, 0, 0)`.
pub const U1_NORTH: Vec3 = Vec3::new(0.0, 1.0, 0.0);
pub const U2_NORTH: Vec3 = Vec3::new(1.0, 0.0, 0.0);

/// Parallel transport of `(u1(N), u2(N))` along the meridian from `N` to
/// `p`: `u1 = cos β e1 + sin β e2`, `u2 = -sin β e1 + cos β e2`.
pub fn transport_frame(p: &SphericalPoint) -> Result<(Vec3, Vec3)> {
    let f = frame_at(p)?;
    let (sb, cb) = p.beta().sin_cos();
    Ok((f.e1 * cb + f.e2 * sb, f.e2 * cb - f.e1 * sb))
}

/// Transport of the vector `s1 u1(N) + s2 u2(N)` to the point at latitude
/// `alpha` on meridian `beta`; defined at the pole itself.
fn transport_on_meridian(alpha: f64, beta: f64, s1: f64, s2: f64) -> Vec3 {
    let (sb, cb) = beta.sin_cos();
    let e1 = east_direction(beta);
    let e2 = -north_direction(alpha, beta);
    let u1 = e1 * cb + e2 * sb;
    let u2 = e2 * cb - e1 * sb;
    u1 * s1 + u2 * s2
}

/// `T_N S² ≅ R²` through `X ↦ x1 (1, 0, 0) + x2 (0, -1, 0)`. Returns the
/// point `exp(X)` as (latitude, longitude).
fn exp_north(x: [f64; 2]) -> Result<(f64, f64)> {
    let r = x[0].hypot(x[1]);
    if !(r < FRAC_PI_2) {
        return Err(Error::OutsideChart { norm: r });
    }
    Ok((FRAC_PI_2 - r, (-x[1]).atan2(x[0])))
}

/// `(exp(X), P_{exp X}(σ))` over the northern hemisphere, with `σ` in the
/// basis `(u1(N), u2(N))`.
pub fn trivialize(x: [f64; 2], sigma: [f64; 2]) -> Result<BundlePoint> {
    let (alpha, beta) = exp_north(x)?;
    let s = sigma_unit(sigma)?;
    let p = crate::sphere::embed(alpha, beta);
    let w = if alpha == FRAC_PI_2 {
        U1_NORTH * s[0] + U2_NORTH * s[1]
    } else {
        transport_on_meridian(alpha, beta, s[0], s[1])
    };
    BundlePoint::new(if alpha == FRAC_PI_2 { NORTH } else { p }, w)
}

/// The southern counterpart: the northern trivialization with the fiber
/// angle reversed, followed by `(x, y, z) ↦ (x, y, -z)`.
pub fn trivialize_south(x: [f64; 2], sigma: [f64; 2]) -> Result<BundlePoint> {
    let b = trivialize(x, [sigma[0], -sigma[1]])?;
    BundlePoint::new(reflect(&b.p), reflect(&b.w))
}

pub(crate) fn reflect(v: &Vec3) -> Vec3 {
    Vec3::new(v.x, v.y, -v.z)
}

fn sigma_unit(sigma: [f64; 2]) -> Result<[f64; 2]> {
    let n = sigma[0].hypot(sigma[1]);
    if (n - 1.0).abs() > BUNDLE_TOL {
        return Err(Error::NotOnBundle {
            residual: (n - 1.0).abs(),
        });
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimizers::canonical_field;
    use crate::sphere::{field_vector, frame_at};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn transport_normalization() {
        let p = SphericalPoint::new(0.0, 0.0).unwrap();
        let (u1, u2) = transport_frame(&p).unwrap();
        assert_abs_diff_eq!(u1, Vec3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(u2, Vec3::new(0.0, 0.0, -1.0), epsilon = 1e-15);
        for alpha in [-1.2, 0.4, 1.5] {
            let p = SphericalPoint::new(alpha, 0.0).unwrap();
            let (u1, _) = transport_frame(&p).unwrap();
            assert_abs_diff_eq!(u1, frame_at(&p).unwrap().e1, epsilon = 1e-15);
        }
    }

    #[test]
    fn transport_limit_at_north() {
        for beta in [0.0, FRAC_PI_2, 2.0, 4.5] {
            let p = SphericalPoint::new(FRAC_PI_2 - 1e-7, beta).unwrap();
            let (u1, u2) = transport_frame(&p).unwrap();
            assert_abs_diff_eq!(u1, U1_NORTH, epsilon = 1e-6);
            assert_abs_diff_eq!(u2, U2_NORTH, epsilon = 1e-6);
        }
    }

    #[test]
    fn trivialize_examples() {
        let b = trivialize([0.0, 0.0], [0.6, 0.8]).unwrap();
        assert_eq!(b.p, NORTH);
        assert_abs_diff_eq!(b.w, Vec3::new(0.8, 0.6, 0.0), epsilon = 1e-15);

        let b = trivialize([FRAC_PI_4, 0.0], [1.0, 0.0]).unwrap();
        let p = SphericalPoint::new(FRAC_PI_4, 0.0).unwrap();
        assert_abs_diff_eq!(b.p, p.embed(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.w, transport_frame(&p).unwrap().0, epsilon = 1e-15);

        // x2 points along (0, -1, 0), the meridian β = 3π/2
        let b = trivialize([0.0, FRAC_PI_4], [0.0, 1.0]).unwrap();
        let p = SphericalPoint::new(FRAC_PI_4, 1.5 * PI).unwrap();
        assert_abs_diff_eq!(b.p, p.embed(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.w, transport_frame(&p).unwrap().1, epsilon = 1e-15);

        assert!(matches!(
            trivialize([FRAC_PI_2, 0.0], [1.0, 0.0]),
            Err(Error::OutsideChart { .. })
        ));
    }

    #[test]
    fn south_chart_lands_in_south() {
        let b = trivialize_south([0.5, -0.3], [0.0, 1.0]).unwrap();
        assert!(b.p.z < 0.0);
        assert!(b.residual() < 1e-14);
    }

    #[test]
    fn frames_agree_on_canonical_fields() {
        for k in 1..=6 {
            let v = canonical_field(k, 0.0).unwrap();
            for (alpha, beta) in [(0.3, 0.2), (-1.0, 2.5), (1.4, 5.9)] {
                let p = SphericalPoint::new(alpha, beta).unwrap();
                let t = -beta;
                let kt = k as f64 * t;
                let (u1, u2) = transport_frame(&p).unwrap();
                let f = frame_at(&p).unwrap();
                let in_u = u1 * kt.cos() + u2 * kt.sin();
                let k1t = (k - 1) as f64 * t;
                let in_e = f.e1 * k1t.cos() + f.e2 * k1t.sin();
                let v = field_vector(&v, &p).unwrap();
                assert_abs_diff_eq!(in_u, v, epsilon = 1e-12);
                assert_abs_diff_eq!(in_e, v, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn embedding_is_isometric_on_basis() {
        let p = Vec3::new(0.3, -0.4, 0.5).normalize();
        let w = p.cross(&Vec3::new(1.0, 0.2, 0.0)).normalize();
        let b = tangent_basis(&p, &w);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(b[i].dot(&b[j]), expect, epsilon = 1e-14);
            }
        }
        assert_abs_diff_eq!(sasaki_embedding(&p, &w).norm(), 1.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn rejects_off_bundle() {
        assert!(BundlePoint::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).is_err());
        assert!(BundlePoint::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)).is_ok());
    }
}
