use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use super::{json_vec, ModelSpace, SampleSpace};
use crate::error::{domain, Result};
use crate::geometry::{check_unit_interval, HadamardSpace, TangentSpace};

const CONSTRAINT_TOL: f64 = 1e-10;

/// `-x₀y₀ + Σ xᵢyᵢ`
pub fn minkowski(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    -x[0] * y[0] + x.rows(1, x.len() - 1).dot(&y.rows(1, y.len() - 1))
}

/// A point `(x₀, …, x_d)` with `⟨x,x⟩ = -1` and `x₀ > 0`.
///
/// The time coordinate is always recomputed from the spatial part, so the
/// constraint holds to round-off after every operation.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint(DVector<f64>);

impl HyperboloidPoint {
    /// Checks the Minkowski constraint (to 1e-10, relative to `x₀²`) and re-normalizes.
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(domain("hyperboloid points need at least two coordinates"));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(domain("non-finite hyperboloid coordinate"));
        }
        if coords[0] <= 0.0 {
            return Err(domain("hyperboloid point must lie on the upper sheet (x0 > 0)"));
        }
        let q = minkowski(&coords, &coords);
        if (q + 1.0).abs() > CONSTRAINT_TOL * coords[0].powi(2).max(1.0) {
            return Err(domain(format!("Minkowski norm is {q}, expected -1")));
        }
        Ok(Self::from_spatial(coords.rows(1, coords.len() - 1).into_owned()))
    }

    /// Lifts a spatial vector `v ∈ ℝᵈ` to `(√(1+|v|²), v)`.
    pub fn from_spatial(spatial: DVector<f64>) -> Self {
        let mut coords = DVector::zeros(spatial.len() + 1);
        coords[0] = (1.0 + spatial.norm_squared()).sqrt();
        coords.rows_mut(1, spatial.len()).copy_from(&spatial);
        Self(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Self::from_spatial(DVector::zeros(dim))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    fn renormalized(v: DVector<f64>) -> Self {
        let spatial = v.rows(1, v.len() - 1).into_owned();
        Self::from_spatial(spatial)
    }
}

/// Hyperbolic space Hᵈ, `δ(x,y) = arccosh(-⟨x,y⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperboloid {
    pub dim: usize,
    /// Standard deviation of the spatial coordinates drawn by the sampler.
    pub spread: f64,
}

impl Hyperboloid {
    pub fn new(dim: usize) -> Self {
        Self { dim, spread: 1.0 }
    }

    fn check(&self, p: &HyperboloidPoint) -> Result<()> {
        if p.dim() != self.dim {
            return Err(domain(format!("expected H^{}, got a point of H^{}", self.dim, p.dim())));
        }
        Ok(())
    }

    /// `(cosh δ, δ)`; uses `δ = 2 asinh(‖x−y‖_L / 2)` near the diagonal where
    /// `arccosh` loses half the digits.
    fn cosh_and_distance(&self, a: &HyperboloidPoint, b: &HyperboloidPoint) -> (f64, f64) {
        let c = (-minkowski(&a.0, &b.0)).max(1.0);
        let d = if c < 1.5 {
            let diff = &a.0 - &b.0;
            let chord = minkowski(&diff, &diff).max(0.0).sqrt();
            2.0 * (0.5 * chord).asinh()
        } else {
            c.acosh()
        };
        (c, d)
    }
}

impl HadamardSpace for Hyperboloid {
    type Point = HyperboloidPoint;

    fn descriptor(&self) -> String {
        format!("hyperboloid:{}", self.dim)
    }

    fn validate(&self, p: &HyperboloidPoint) -> Result<()> {
        self.check(p)?;
        let q = minkowski(&p.0, &p.0);
        if (q + 1.0).abs() > CONSTRAINT_TOL * p.0[0].powi(2).max(1.0) || p.0[0] <= 0.0 {
            return Err(domain(format!("point violates the hyperboloid constraint ({q})")));
        }
        Ok(())
    }

    fn distance(&self, a: &HyperboloidPoint, b: &HyperboloidPoint) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.cosh_and_distance(a, b).1)
    }

    fn geodesic(&self, a: &HyperboloidPoint, b: &HyperboloidPoint, t: f64) -> Result<HyperboloidPoint> {
        check_unit_interval(t)?;
        self.check(a)?;
        self.check(b)?;
        if t == 0.0 {
            return Ok(a.clone());
        }
        if t == 1.0 {
            return Ok(b.clone());
        }
        let v = self.log(a, b)?;
        self.exp(a, &(v * t))
    }
}

impl TangentSpace for Hyperboloid {
    type Tangent = DVector<f64>;

    /// `δ · u / ‖u‖_L` with `u = y − cosh(δ) x` the Minkowski projection of `y` onto `T_x`.
    fn log(&self, base: &HyperboloidPoint, p: &HyperboloidPoint) -> Result<DVector<f64>> {
        self.check(base)?;
        self.check(p)?;
        let (c, d) = self.cosh_and_distance(base, p);
        let u = &p.0 - &base.0 * c;
        let un = minkowski(&u, &u).max(0.0).sqrt();
        if d == 0.0 || un == 0.0 {
            return Ok(DVector::zeros(self.dim + 1));
        }
        Ok(u * (d / un))
    }

    fn exp(&self, base: &HyperboloidPoint, v: &DVector<f64>) -> Result<HyperboloidPoint> {
        self.check(base)?;
        if v.len() != self.dim + 1 {
            return Err(domain("tangent vector has the wrong length"));
        }
        let n = self.norm(base, v);
        if n == 0.0 {
            return Ok(base.clone());
        }
        let raw = &base.0 * n.cosh() + v * (n.sinh() / n);
        Ok(HyperboloidPoint::renormalized(raw))
    }

    fn norm(&self, _base: &HyperboloidPoint, v: &DVector<f64>) -> f64 {
        minkowski(v, v).max(0.0).sqrt()
    }

    fn zero_tangent(&self, _base: &HyperboloidPoint) -> DVector<f64> {
        DVector::zeros(self.dim + 1)
    }

    fn add_scaled(&self, acc: &mut DVector<f64>, w: f64, v: &DVector<f64>) {
        acc.axpy(w, v, 1.0);
    }

    fn scale(&self, v: &DVector<f64>, s: f64) -> DVector<f64> {
        v * s
    }
}

impl SampleSpace for Hyperboloid {
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> HyperboloidPoint {
        let spatial = DVector::from_fn(self.dim, |_, _| self.spread * rng.sample::<f64, _>(StandardNormal));
        HyperboloidPoint::from_spatial(spatial)
    }
}

impl ModelSpace for Hyperboloid {
    fn base_point(&self) -> HyperboloidPoint {
        HyperboloidPoint::origin(self.dim)
    }

    fn default_direction(&self) -> DVector<f64> {
        let mut e = DVector::zeros(self.dim + 1);
        e[1] = 1.0;
        e
    }

    fn sample_unit_tangent<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        loop {
            let s: DVector<f64> = DVector::from_fn(self.dim, |_, _| rng.sample(StandardNormal));
            let n = s.norm();
            if n > 1e-6 {
                let mut v = DVector::zeros(self.dim + 1);
                v.rows_mut(1, self.dim).copy_from(&(s / n));
                return v;
            }
        }
    }

    fn point_to_json(&self, p: &HyperboloidPoint) -> Value {
        Value::from(p.0.iter().copied().collect::<Vec<_>>())
    }

    fn point_from_json(&self, v: &Value) -> Result<HyperboloidPoint> {
        let p = HyperboloidPoint::new(DVector::from_vec(json_vec(v, "hyperboloid point")?))?;
        self.check(&p)?;
        Ok(p)
    }

    /// Directions at the apex are given by their `d` spatial components.
    fn tangent_from_json(&self, v: &Value) -> Result<DVector<f64>> {
        let s = json_vec(v, "hyperboloid direction")?;
        if s.len() != self.dim {
            return Err(domain(format!("hyperboloid direction needs {} spatial components", self.dim)));
        }
        let mut t = DVector::zeros(self.dim + 1);
        t.rows_mut(1, self.dim).copy_from_slice(&s);
        Ok(t)
    }
}
