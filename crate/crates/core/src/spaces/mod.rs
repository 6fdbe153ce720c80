//! Concrete Hadamard spaces.
//!
//! * [`Euclidean`]: ℝᵈ with straight-line geodesics (flat, so every CAT(0)
//!   inequality is either an identity or the triangle inequality).
//! * [`Spd`]: real symmetric positive definite matrices with the
//!   affine-invariant metric `δ(A,B) = ‖log(A^{-1/2} B A^{-1/2})‖_F`.
//! * [`Hyperboloid`]: the hyperboloid model of hyperbolic space Hᵈ.
//! * [`BentEuclidean`]: a deliberately broken space used as a negative control
//!   for the inequality checkers.

mod bent;
mod euclid;
mod hyperboloid;
mod spd;

pub use bent::BentEuclidean;
pub use euclid::{Euclidean, EuclideanPoint};
pub use hyperboloid::{Hyperboloid, HyperboloidPoint};
pub use spd::{Spd, SpdPoint, MAX_SAMPLE_CONDITION};

use rand::Rng;
use serde_json::Value;

use crate::error::Result;
use crate::geometry::{HadamardSpace, TangentSpace};

/// Spaces that can draw seeded random points for property checks.
pub trait SampleSpace: HadamardSpace {
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;
}

/// Spaces with a distinguished base point, JSON encodings and directions,
/// enough to build the named test functions used by experiments.
pub trait ModelSpace: TangentSpace + SampleSpace {
    /// Origin, identity matrix or hyperboloid apex.
    fn base_point(&self) -> Self::Point;

    /// A fixed unit tangent vector at [`ModelSpace::base_point`].
    fn default_direction(&self) -> Self::Tangent;

    /// A seeded random unit tangent vector at [`ModelSpace::base_point`].
    fn sample_unit_tangent<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Tangent;

    fn point_to_json(&self, p: &Self::Point) -> Value;
    fn point_from_json(&self, v: &Value) -> Result<Self::Point>;
    /// Parses a tangent vector at the base point.
    fn tangent_from_json(&self, v: &Value) -> Result<Self::Tangent>;

    /// `exp_base(s · v)`: the point at signed arclength `s·‖v‖` along the ray from the base point.
    fn along(&self, v: &Self::Tangent, s: f64) -> Result<Self::Point> {
        let base = self.base_point();
        self.exp(&base, &self.scale(v, s))
    }
}

pub(crate) fn json_vec(v: &Value, what: &str) -> Result<Vec<f64>> {
    serde_json::from_value::<Vec<f64>>(v.clone())
        .map_err(|e| crate::error::domain(format!("{what}: expected a flat array of numbers ({e})")))
}

pub(crate) fn json_matrix(v: &Value, what: &str) -> Result<Vec<Vec<f64>>> {
    serde_json::from_value::<Vec<Vec<f64>>>(v.clone()).map_err(|e| {
        crate::error::domain(format!("{what}: expected a row-major array of rows ({e})"))
    })
}
