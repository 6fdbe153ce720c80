//! Barycenters of finitely supported measures.
//!
//! For a finite measure the L¹ barycenter `argmin ∫ δ²(z,x) − δ²(y,x) dμ` and
//! the Cartan form `argmin ∫ δ²(z,x) dμ` differ by a constant in `z`, so only
//! the latter is implemented.

use crate::error::{argument, Result};
use crate::geometry::TangentSpace;

/// A probability measure with finitely many atoms.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure<P> {
    atoms: Vec<P>,
    weights: Vec<f64>,
}

impl<P> EmpiricalMeasure<P> {
    /// Normalizes `weights` to sum to one. All weights must be positive and finite.
    pub fn new(atoms: Vec<P>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(argument("empirical measure needs at least one atom"));
        }
        if atoms.len() != weights.len() {
            return Err(argument(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(argument("weights must be positive and finite"));
        }
        let total: f64 = weights.iter().sum();
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { atoms, weights })
    }

    pub fn uniform(atoms: Vec<P>) -> Result<Self> {
        let w = vec![1.0; atoms.len()];
        Self::new(atoms, w)
    }

    pub fn atoms(&self) -> &[P] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, f64)> {
        self.atoms.iter().zip(self.weights.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KarcherOptions {
    /// Stop once the Riemannian norm of the full update step is at most this.
    pub tol: f64,
    pub max_iter: usize,
}

impl KarcherOptions {
    pub const fn new(tol: f64, max_iter: usize) -> Self {
        Self { tol, max_iter }
    }

    /// Tighter default for flat or commuting configurations.
    pub const fn flat() -> Self {
        Self { tol: 1e-10, max_iter: 500 }
    }
}

impl Default for KarcherOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 500 }
    }
}

#[derive(Debug, Clone)]
pub struct BarycenterResult<P> {
    pub point: P,
    /// `Σ wⱼ δ²(xⱼ, point)`
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of the full update step `Σ wⱼ log_point(xⱼ)` at the returned point.
    pub final_step: f64,
}

/// Weighted mean of the logs at `z` and the objective value there.
fn descent<S: TangentSpace>(
    space: &S,
    measure: &EmpiricalMeasure<S::Point>,
    z: &S::Point,
) -> Result<(S::Tangent, f64, f64)> {
    let mut v = space.zero_tangent(z);
    let mut objective = 0.0;
    for (x, w) in measure.iter() {
        let l = space.log(z, x)?;
        objective += w * space.norm(z, &l).powi(2);
        space.add_scaled(&mut v, w, &l);
    }
    let step = space.norm(z, &v);
    Ok((v, objective, step))
}

/// Minimizer of `z ↦ Σ wⱼ δ²(xⱼ, z)` by the fixed-point iteration
/// `z ← exp_z(s · Σ wⱼ log_z(xⱼ))`, started at the first atom with `s = 1` and
/// halving `s` whenever the objective would increase.
///
/// Hitting `max_iter` (or a step that cannot be shortened further) returns
/// the last iterate with `converged = false`.
pub fn karcher_mean<S: TangentSpace>(
    space: &S,
    measure: &EmpiricalMeasure<S::Point>,
    opts: KarcherOptions,
) -> Result<BarycenterResult<S::Point>> {
    if !(opts.tol > 0.0) {
        return Err(argument("karcher tolerance must be positive"));
    }
    for x in measure.atoms() {
        space.validate(x)?;
    }
    let mut z = measure.atoms()[0].clone();
    let (mut v, mut objective, mut step) = descent(space, measure, &z)?;
    let mut iterations = 0;
    while step > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let mut scale = 1.0;
        loop {
            let cand = space.exp(&z, &space.scale(&v, scale))?;
            let (cv, cobj, cstep) = descent(space, measure, &cand)?;
            if cobj <= objective * (1.0 + 1e-14) + 1e-300 {
                z = cand;
                v = cv;
                objective = cobj;
                step = cstep;
                break;
            }
            scale *= 0.5;
            if scale < 1e-12 {
                return Ok(BarycenterResult { point: z, objective, iterations, converged: false, final_step: step });
            }
        }
    }
    Ok(BarycenterResult { point: z, objective, iterations, converged: step <= opts.tol, final_step: step })
}
