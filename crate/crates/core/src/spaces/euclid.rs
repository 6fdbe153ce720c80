use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use super::{json_vec, ModelSpace, SampleSpace};
use crate::error::{domain, Result};
use crate::geometry::{check_unit_interval, HadamardSpace, TangentSpace};

pub type EuclideanPoint = DVector<f64>;

/// ℝᵈ with the usual distance. Geodesics are line segments, so inductive
/// means reduce to running arithmetic means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    pub dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn point(&self, coords: &[f64]) -> Result<EuclideanPoint> {
        let p = DVector::from_column_slice(coords);
        self.validate(&p)?;
        Ok(p)
    }
}

impl HadamardSpace for Euclidean {
    type Point = EuclideanPoint;

    fn descriptor(&self) -> String {
        format!("euclid:{}", self.dim)
    }

    fn validate(&self, p: &EuclideanPoint) -> Result<()> {
        if p.len() != self.dim {
            return Err(domain(format!("expected {} coordinates, got {}", self.dim, p.len())));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(domain("non-finite coordinate"));
        }
        Ok(())
    }

    fn distance(&self, a: &EuclideanPoint, b: &EuclideanPoint) -> Result<f64> {
        Ok((a - b).norm())
    }

    fn geodesic(&self, a: &EuclideanPoint, b: &EuclideanPoint, t: f64) -> Result<EuclideanPoint> {
        check_unit_interval(t)?;
        if t == 1.0 {
            return Ok(b.clone());
        }
        Ok(a + (b - a) * t)
    }
}

impl TangentSpace for Euclidean {
    type Tangent = DVector<f64>;

    fn log(&self, base: &EuclideanPoint, p: &EuclideanPoint) -> Result<DVector<f64>> {
        Ok(p - base)
    }

    fn exp(&self, base: &EuclideanPoint, v: &DVector<f64>) -> Result<EuclideanPoint> {
        Ok(base + v)
    }

    fn norm(&self, _base: &EuclideanPoint, v: &DVector<f64>) -> f64 {
        v.norm()
    }

    fn zero_tangent(&self, _base: &EuclideanPoint) -> DVector<f64> {
        DVector::zeros(self.dim)
    }

    fn add_scaled(&self, acc: &mut DVector<f64>, w: f64, v: &DVector<f64>) {
        acc.axpy(w, v, 1.0);
    }

    fn scale(&self, v: &DVector<f64>, s: f64) -> DVector<f64> {
        v * s
    }
}

impl SampleSpace for Euclidean {
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> EuclideanPoint {
        DVector::from_fn(self.dim, |_, _| rng.sample(StandardNormal))
    }
}

impl ModelSpace for Euclidean {
    fn base_point(&self) -> EuclideanPoint {
        DVector::zeros(self.dim)
    }

    fn default_direction(&self) -> DVector<f64> {
        let mut e = DVector::zeros(self.dim);
        e[0] = 1.0;
        e
    }

    fn sample_unit_tangent<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        loop {
            let v: DVector<f64> = DVector::from_fn(self.dim, |_, _| rng.sample(StandardNormal));
            let n = v.norm();
            if n > 1e-6 {
                return v / n;
            }
        }
    }

    fn point_to_json(&self, p: &EuclideanPoint) -> Value {
        Value::from(p.iter().copied().collect::<Vec<_>>())
    }

    fn point_from_json(&self, v: &Value) -> Result<EuclideanPoint> {
        self.point(&json_vec(v, "euclidean point")?)
    }

    fn tangent_from_json(&self, v: &Value) -> Result<DVector<f64>> {
        self.point(&json_vec(v, "euclidean direction")?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_of_diagonal_segment() {
        let e = Euclidean::new(2);
        let a = e.point(&[0.0, 0.0]).unwrap();
        let b = e.point(&[2.0, 2.0]).unwrap();
        let m = e.geodesic(&a, &b, 0.5).unwrap();
        assert_eq!(m.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn endpoints_are_exact() {
        let e = Euclidean::new(3);
        let a = e.point(&[0.1, -3.0, 7.25]).unwrap();
        let b = e.point(&[1e3, 0.3, -2.0]).unwrap();
        assert_eq!(e.geodesic(&a, &b, 0.0).unwrap(), a);
        assert_eq!(e.geodesic(&a, &b, 1.0).unwrap(), b);
    }

    #[test]
    fn rejects_wrong_dimension_and_nan() {
        let e = Euclidean::new(2);
        assert!(e.point(&[1.0]).is_err());
        assert!(e.point(&[1.0, f64::NAN]).is_err());
        let a = e.point(&[0.0, 0.0]).unwrap();
        assert!(e.geodesic(&a, &a, -0.1).is_err());
    }
}
