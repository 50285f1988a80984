//! Volume of unit vector fields on the sphere with the two poles removed.
//!
//! A field is an angle function `θ(α, β)` against a fixed global frame
//! ([`sphere`]). Its volume is the area of its graph in the unit tangent
//! bundle, evaluated as an improper integral ([`quadrature`]). The index
//! bound `vol ≥ π L(ξ_k)` and the ingredients of its proof live in
//! [`index`], the fields attaining it in [`minimizers`], and the surfaces
//! they trace in the unit tangent bundle in [`bundle`].

// `!(x > 0.0)` style checks are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod elliptic;
pub mod error;
pub mod index;
pub mod minimizers;
pub mod quadrature;
pub mod sphere;

mod par;

pub use error::{Error, Result};
pub use quadrature::{volume, QuadratureConfig, VolumeResult};
pub use sphere::{AngleField, Frame, SphericalPoint, Vec3};
