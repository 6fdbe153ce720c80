//! Hadamard-space interface and the CAT(0) comparison inequalities.
//!
//! A Hadamard space is described here only through its distance and its
//! geodesic interpolation `x #_t y`. Every inequality checker returns an
//! [`InequalitySlack`] instead of a boolean, so callers can see how close a
//! configuration came to violating the bound.

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

/// A complete geodesic metric space of non-positive curvature.
pub trait HadamardSpace {
    type Point: Clone + std::fmt::Debug;

    /// Human-readable size descriptor, e.g. `"spd:3"`.
    fn descriptor(&self) -> String;

    /// Rejects values that are not points of this space.
    fn validate(&self, p: &Self::Point) -> Result<()>;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Result<f64>;

    /// The point `a #_t b` at fraction `t` of the geodesic from `a` to `b`.
    fn geodesic(&self, a: &Self::Point, b: &Self::Point, t: f64) -> Result<Self::Point>;

    /// `(a #_t b, δ(a, b))`. Spaces whose geodesic already computes the
    /// distance override this to avoid doing the work twice.
    fn geodesic_with_distance(
        &self,
        a: &Self::Point,
        b: &Self::Point,
        t: f64,
    ) -> Result<(Self::Point, f64)> {
        Ok((self.geodesic(a, b, t)?, self.distance(a, b)?))
    }
}

/// Spaces that also expose the Riemannian exponential and logarithm.
///
/// Tangent vectors are always interpreted relative to the base point they were
/// produced at; mixing bases is a logic error.
pub trait TangentSpace: HadamardSpace {
    type Tangent: Clone + std::fmt::Debug;

    fn log(&self, base: &Self::Point, p: &Self::Point) -> Result<Self::Tangent>;
    fn exp(&self, base: &Self::Point, v: &Self::Tangent) -> Result<Self::Point>;
    fn norm(&self, base: &Self::Point, v: &Self::Tangent) -> f64;
    fn zero_tangent(&self, base: &Self::Point) -> Self::Tangent;
    /// `acc += w * v`
    fn add_scaled(&self, acc: &mut Self::Tangent, w: f64, v: &Self::Tangent);
    fn scale(&self, v: &Self::Tangent, s: f64) -> Self::Tangent {
        let mut out = v.clone();
        self.add_scaled(&mut out, s - 1.0, v);
        out
    }
}

/// Absolute/relative tolerance pair: an inequality passes when
/// `slack >= -max(abs, rel * |rhs|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// `max(abs, abs * |rhs|)`, i.e. the same constant used absolutely and relatively.
    pub const fn uniform(tol: f64) -> Self {
        Self { abs: tol, rel: tol }
    }

    pub fn allowance(&self, rhs: f64) -> f64 {
        self.abs.max(self.rel * rhs.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::uniform(1e-8)
    }
}

/// Outcome of evaluating an inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalitySlack {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub slack: f64,
    pub holds: bool,
}

impl InequalitySlack {
    pub fn evaluate(lhs: f64, rhs: f64, tol: Tolerance) -> Self {
        let slack = rhs - lhs;
        Self {
            lhs,
            rhs,
            slack,
            holds: slack >= -tol.allowance(rhs),
        }
    }

    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self::evaluate(lhs, rhs, Tolerance::default())
    }

    /// Re-judges the same numbers against another tolerance.
    pub fn holds_with(&self, tol: Tolerance) -> bool {
        self.slack >= -tol.allowance(self.rhs)
    }
}

pub(crate) fn check_unit_interval(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(argument(format!("geodesic parameter t = {t} is outside [0, 1]")))
    }
}

/// Semiparallelogram law at the midpoint `m = x #_½ y`:
/// `δ²(m,z) <= ½δ²(x,z) + ½δ²(y,z) - ¼δ²(x,y)`.
pub fn check_semiparallelogram<S: HadamardSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
) -> Result<InequalitySlack> {
    for p in [x, y, z] {
        space.validate(p)?;
    }
    let m = space.geodesic(x, y, 0.5)?;
    let lhs = space.distance(&m, z)?.powi(2);
    let rhs = 0.5 * space.distance(x, z)?.powi(2) + 0.5 * space.distance(y, z)?.powi(2)
        - 0.25 * space.distance(x, y)?.powi(2);
    Ok(InequalitySlack::new(lhs, rhs))
}

/// `δ²(x #_t y, z) <= (1-t)δ²(x,z) + tδ²(y,z) - t(1-t)δ²(x,y)`.
pub fn check_geodesic_convexity<S: HadamardSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
    t: f64,
) -> Result<InequalitySlack> {
    check_unit_interval(t)?;
    for p in [x, y, z] {
        space.validate(p)?;
    }
    let p = space.geodesic(x, y, t)?;
    let lhs = space.distance(&p, z)?.powi(2);
    let rhs = (1.0 - t) * space.distance(x, z)?.powi(2) + t * space.distance(y, z)?.powi(2)
        - t * (1.0 - t) * space.distance(x, y)?.powi(2);
    Ok(InequalitySlack::new(lhs, rhs))
}

/// Joint convexity of the distance along two geodesics:
/// `δ(a #_t a', b #_t b') <= (1-t)δ(a,b) + tδ(a',b')`.
pub fn check_convexity_of_distance<S: HadamardSpace>(
    space: &S,
    a: &S::Point,
    a2: &S::Point,
    b: &S::Point,
    b2: &S::Point,
    t: f64,
) -> Result<InequalitySlack> {
    check_unit_interval(t)?;
    for p in [a, a2, b, b2] {
        space.validate(p)?;
    }
    let pa = space.geodesic(a, a2, t)?;
    let pb = space.geodesic(b, b2, t)?;
    let lhs = space.distance(&pa, &pb)?;
    let rhs = (1.0 - t) * space.distance(a, b)? + t * space.distance(a2, b2)?;
    Ok(InequalitySlack::new(lhs, rhs))
}

/// Reshetnyak's quadruple comparison:
/// `δ²(x1,x3) + δ²(x2,x4) <= δ²(x2,x3) + δ²(x1,x4) + 2δ(x1,x2)δ(x3,x4)`.
pub fn check_reshetnyak<S: HadamardSpace>(
    space: &S,
    x1: &S::Point,
    x2: &S::Point,
    x3: &S::Point,
    x4: &S::Point,
) -> Result<InequalitySlack> {
    for p in [x1, x2, x3, x4] {
        space.validate(p)?;
    }
    let d = |a: &S::Point, b: &S::Point| space.distance(a, b);
    let lhs = d(x1, x3)?.powi(2) + d(x2, x4)?.powi(2);
    let rhs = d(x2, x3)?.powi(2) + d(x1, x4)?.powi(2) + 2.0 * d(x1, x2)? * d(x3, x4)?;
    Ok(InequalitySlack::new(lhs, rhs))
}
