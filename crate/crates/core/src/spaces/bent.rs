use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::SampleSpace;
use crate::error::{domain, Result};
use crate::geometry::{check_unit_interval, HadamardSpace};

/// Euclidean distance paired with a curve that is *not* the geodesic: the
/// straight segment is pushed sideways by `bend · t(1−t) · |y−x|` along the
/// last coordinate axis.
///
/// This is not a Hadamard space. It exists so that test suites can confirm
/// the inequality checkers actually reject something.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BentEuclidean {
    pub dim: usize,
    pub bend: f64,
}

impl BentEuclidean {
    pub fn new(dim: usize) -> Self {
        Self { dim, bend: 1.0 }
    }
}

impl HadamardSpace for BentEuclidean {
    type Point = DVector<f64>;

    fn descriptor(&self) -> String {
        format!("broken:{}", self.dim)
    }

    fn validate(&self, p: &DVector<f64>) -> Result<()> {
        if p.len() != self.dim || p.iter().any(|x| !x.is_finite()) {
            return Err(domain("not a point of the bent space"));
        }
        Ok(())
    }

    fn distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
        Ok((a - b).norm())
    }

    fn geodesic(&self, a: &DVector<f64>, b: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        check_unit_interval(t)?;
        let mut p = a * (1.0 - t) + b * t;
        p[self.dim - 1] += self.bend * t * (1.0 - t) * (a - b).norm();
        Ok(p)
    }
}

impl SampleSpace for BentEuclidean {
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        DVector::from_fn(self.dim, |_, _| rng.sample(StandardNormal))
    }
}
