//! Metric mollifiers and L¹ estimates for orbit functions.
//!
//! `A_η(g₀)` is the barycenter of the values of `A` over the translate
//! `g₀ + U_η` of a small identity neighborhood. It needs nothing but distances
//! and barycenters, so it works in any Hadamard space. The integral over
//! `U_η` is replaced by a fixed grid, which makes the mollifier deterministic.

use crate::ergodic::{GroupElement, KroneckerSystem, OrbitFunction, Regularity};
use crate::error::{argument, Error, Result};
use crate::geometry::{HadamardSpace, InequalitySlack, TangentSpace};
use crate::means::{karcher_mean, BarycenterResult, EmpiricalMeasure, KarcherOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierConfig {
    pub eta: f64,
    pub samples_per_eval: usize,
    /// 0 keeps the neighborhood grid centered; other values shift it by a seeded offset.
    pub sampler_seed: u64,
    pub karcher: KarcherOptions,
}

impl MollifierConfig {
    pub fn new(eta: f64, samples_per_eval: usize) -> Self {
        Self { eta, samples_per_eval, sampler_seed: 0, karcher: KarcherOptions::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(argument(format!("eta must be positive, got {}", self.eta)));
        }
        if self.samples_per_eval == 0 {
            return Err(argument("samples_per_eval must be at least 1"));
        }
        Ok(())
    }
}

/// A mollifier bound to one system: the neighborhood grid is built once.
#[derive(Debug, Clone)]
pub struct Mollifier {
    system: KroneckerSystem,
    offsets: Vec<GroupElement>,
    measure: f64,
    config: MollifierConfig,
    warnings: Vec<String>,
}

impl Mollifier {
    pub fn new(system: &KroneckerSystem, config: MollifierConfig) -> Result<Self> {
        config.validate()?;
        let nb = system.neighborhood(config.eta, config.samples_per_eval, config.sampler_seed)?;
        Ok(Self { system: system.clone(), offsets: nb.offsets, measure: nb.measure, config, warnings: nb.warnings })
    }

    /// Haar measure of `U_η`.
    pub fn neighborhood_measure(&self) -> f64 {
        self.measure
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn config(&self) -> &MollifierConfig {
        &self.config
    }

    /// The empirical measure `{A(g₀ + hᵢ)}` whose barycenter is `A_η(g₀)`.
    pub fn local_measure<P>(&self, f: &OrbitFunction<P>, g0: &GroupElement) -> Result<EmpiricalMeasure<P>> {
        let atoms = self
            .offsets
            .iter()
            .map(|h| f.evaluate(&self.system.add(g0, h)?))
            .collect::<Result<Vec<_>>>()?;
        EmpiricalMeasure::uniform(atoms)
    }

    /// Full solver output, including non-converged partial results.
    pub fn solve<S: TangentSpace>(
        &self,
        space: &S,
        f: &OrbitFunction<S::Point>,
        g0: &GroupElement,
    ) -> Result<BarycenterResult<S::Point>> {
        karcher_mean(space, &self.local_measure(f, g0)?, self.config.karcher)
    }

    pub fn apply<S: TangentSpace>(&self, space: &S, f: &OrbitFunction<S::Point>, g0: &GroupElement) -> Result<S::Point> {
        let r = self.solve(space, f, g0)?;
        if !r.converged {
            return Err(Error::NotConverged { iterations: r.iterations, last_step: r.final_step });
        }
        Ok(r.point)
    }
}

/// `A_η(g₀)`.
pub fn mollify<S: TangentSpace>(
    space: &S,
    system: &KroneckerSystem,
    f: &OrbitFunction<S::Point>,
    config: MollifierConfig,
    g0: &GroupElement,
) -> Result<S::Point> {
    Mollifier::new(system, config)?.apply(space, f, g0)
}

/// `A_η` as an orbit function tagged continuous.
pub fn mollified_function<S>(
    space: &S,
    system: &KroneckerSystem,
    f: &OrbitFunction<S::Point>,
    config: MollifierConfig,
) -> Result<OrbitFunction<S::Point>>
where
    S: TangentSpace + Clone + Send + Sync + 'static,
{
    let m = Mollifier::new(system, config)?;
    let (space, f) = (space.clone(), f.clone());
    Ok(OrbitFunction::new(Regularity::Continuous, move |g| m.apply(&space, &f, g)))
}

fn quadrature_mean(system: &KroneckerSystem, n: usize, mut integrand: impl FnMut(&GroupElement) -> Result<f64>) -> Result<f64> {
    let grid = system.quadrature_grid(n)?;
    let mut sum = 0.0;
    for g in &grid {
        sum += integrand(g)?;
    }
    Ok(sum / grid.len() as f64)
}

/// `φ(h) = ∫ δᵖ(A(g), A(g+h)) dm(g)`; exactly 0 at the identity.
pub fn continuity_modulus<S: HadamardSpace>(
    space: &S,
    system: &KroneckerSystem,
    f: &OrbitFunction<S::Point>,
    h: &GroupElement,
    p: u32,
    quadrature_n: usize,
) -> Result<f64> {
    if !(1..=2).contains(&p) {
        return Err(argument(format!("exponent p must be 1 or 2, got {p}")));
    }
    system.contains(h)?;
    if system.is_identity(h) {
        return Ok(0.0);
    }
    quadrature_mean(system, quadrature_n, |g| {
        let d = space.distance(&f.evaluate(g)?, &f.evaluate(&system.add(g, h)?)?)?;
        Ok(d.powi(p as i32))
    })
}

/// `∫ δ(A(g), B(g)) dm(g)` by quadrature.
pub fn l1_distance<S: HadamardSpace>(
    space: &S,
    system: &KroneckerSystem,
    a: &OrbitFunction<S::Point>,
    b: &OrbitFunction<S::Point>,
    quadrature_n: usize,
) -> Result<f64> {
    quadrature_mean(system, quadrature_n, |g| space.distance(&a.evaluate(g)?, &b.evaluate(g)?))
}

/// `δ(b(μ), b(ν)) ≤ Σ wᵢ δ(aᵢ, bᵢ)` for two measures coupled atom by atom.
pub fn check_barycenter_contraction<S: TangentSpace>(
    space: &S,
    measure_a: &EmpiricalMeasure<S::Point>,
    measure_b: &EmpiricalMeasure<S::Point>,
    karcher: KarcherOptions,
) -> Result<InequalitySlack> {
    if measure_a.len() != measure_b.len() {
        return Err(argument(format!("coupled measures have {} and {} atoms", measure_a.len(), measure_b.len())));
    }
    if measure_a.weights().iter().zip(measure_b.weights()).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Err(argument("coupled measures must carry the same weights"));
    }
    let ba = karcher_mean(space, measure_a, karcher)?;
    let bb = karcher_mean(space, measure_b, karcher)?;
    let lhs = space.distance(&ba.point, &bb.point)?;
    let mut rhs = 0.0;
    for ((x, w), y) in measure_a.iter().zip(measure_b.atoms()) {
        rhs += w * space.distance(x, y)?;
    }
    Ok(InequalitySlack::new(lhs, rhs))
}

/// `A^{(N)}(g) = A(g)` if `δ(A(g), z₀) < N`, else `z₀`.
pub fn truncate<S>(space: &S, f: &OrbitFunction<S::Point>, z0: S::Point, radius: f64) -> Result<OrbitFunction<S::Point>>
where
    S: HadamardSpace + Clone + Send + Sync + 'static,
    S::Point: Send + Sync + 'static,
{
    if !(radius > 0.0) {
        return Err(argument(format!("truncation radius must be positive, got {radius}")));
    }
    space.validate(&z0)?;
    let (space, f) = (space.clone(), f.clone());
    Ok(OrbitFunction::new(f.regularity(), move |g| {
        let p = f.evaluate(g)?;
        Ok(if space.distance(&p, &z0)? < radius { p } else { z0.clone() })
    }))
}

/// Result of the mollifier stability check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// Quadrature estimate of `∫ δ(A, B) dm`.
    pub l1: f64,
    /// `m(U_η) · ε`, the admissible L¹ budget.
    pub rho: f64,
    /// `max_g δ(A_η(g), B_η(g)) ≤ ε` over the grid.
    pub bound: InequalitySlack,
}

/// If `∫ δ(A,B) ≤ m(U_η)·ε` then `max_g δ(A_η(g), B_η(g)) ≤ ε`; the maximum is
/// taken over a `grid_n`-point grid. Fails with an argument error when the
/// L¹ premise does not hold for the supplied pair.
#[allow(clippy::too_many_arguments)]
pub fn check_mollifier_stability<S: TangentSpace>(
    space: &S,
    system: &KroneckerSystem,
    a: &OrbitFunction<S::Point>,
    b: &OrbitFunction<S::Point>,
    config: MollifierConfig,
    epsilon: f64,
    grid_n: usize,
    quadrature_n: usize,
) -> Result<StabilityReport> {
    let m = Mollifier::new(system, config)?;
    let rho = m.neighborhood_measure() * epsilon;
    let l1 = l1_distance(space, system, a, b, quadrature_n)?;
    if l1 > rho {
        return Err(argument(format!("L1 distance {l1:e} exceeds the budget m(U_eta)*eps = {rho:e}")));
    }
    let mut worst: f64 = 0.0;
    for g in system.quadrature_grid(grid_n)? {
        let d = space.distance(&m.apply(space, a, &g)?, &m.apply(space, b, &g)?)?;
        worst = worst.max(d);
    }
    Ok(StabilityReport { l1, rho, bound: InequalitySlack::new(worst, epsilon) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Euclidean, EuclideanPoint};

    fn identity_fn() -> OrbitFunction<EuclideanPoint> {
        OrbitFunction::new(Regularity::L1, |g| Ok(EuclideanPoint::from_element(1, g.torus_coord(0)?)))
    }

    #[test]
    fn constant_is_fixed() {
        let e = Euclidean::new(1);
        let sys = KroneckerSystem::golden_rotation();
        let c = OrbitFunction::new(Regularity::Continuous, |_| Ok(EuclideanPoint::from_element(1, 2.5)));
        for eta in [0.5, 0.01] {
            let p = mollify(&e, &sys, &c, MollifierConfig::new(eta, 50), &GroupElement::Torus(vec![0.7])).unwrap();
            assert_eq!(p[0], 2.5);
        }
    }

    #[test]
    fn sliding_window_average_of_identity() {
        let e = Euclidean::new(1);
        let sys = KroneckerSystem::golden_rotation();
        let p = mollify(&e, &sys, &identity_fn(), MollifierConfig::new(0.01, 100), &GroupElement::Torus(vec![0.4])).unwrap();
        assert!((p[0] - 0.4).abs() < 1e-6, "{}", p[0]);
    }

    #[test]
    fn modulus_of_wrapped_identity() {
        // |A(g+0.1) - A(g)| is 0.1 off the wrap set [0.9,1) and 0.9 on it: 0.9*0.1 + 0.1*0.9
        let e = Euclidean::new(1);
        let sys = KroneckerSystem::golden_rotation();
        let f = identity_fn();
        let phi = continuity_modulus(&e, &sys, &f, &GroupElement::Torus(vec![0.1]), 1, 10_000).unwrap();
        assert!((phi - 0.18).abs() < 1e-9, "{phi}");
        assert_eq!(continuity_modulus(&e, &sys, &f, &sys.identity(), 2, 100).unwrap(), 0.0);
        assert!(continuity_modulus(&e, &sys, &f, &sys.identity(), 3, 100).is_err());
    }

    #[test]
    fn l1_of_constants() {
        let e = Euclidean::new(2);
        let sys = KroneckerSystem::cyclic(4, 1).unwrap();
        let p = e.point(&[0.0, 0.0]).unwrap();
        let q = e.point(&[3.0, 4.0]).unwrap();
        let (pc, qc) = (p.clone(), q.clone());
        let a = OrbitFunction::new(Regularity::Continuous, move |_| Ok(pc.clone()));
        let b = OrbitFunction::new(Regularity::Continuous, move |_| Ok(qc.clone()));
        assert_eq!(l1_distance(&e, &sys, &a, &b, 1).unwrap(), 5.0);
        assert_eq!(l1_distance(&e, &sys, &a, &a, 1).unwrap(), 0.0);
    }

    #[test]
    fn truncation_keeps_bounded_functions() {
        let e = Euclidean::new(1);
        let sys = KroneckerSystem::golden_rotation();
        let f = identity_fn();
        let t = truncate(&e, &f, e.point(&[0.0]).unwrap(), 5.0).unwrap();
        assert_eq!(l1_distance(&e, &sys, &f, &t, 1000).unwrap(), 0.0);
        assert!(truncate(&e, &f, e.point(&[0.0]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn coupled_measures_must_match() {
        let e = Euclidean::new(1);
        let a = EmpiricalMeasure::uniform(vec![e.point(&[0.0]).unwrap(), e.point(&[1.0]).unwrap()]).unwrap();
        let b = EmpiricalMeasure::uniform(vec![e.point(&[0.0]).unwrap()]).unwrap();
        assert!(check_barycenter_contraction(&e, &a, &b, KarcherOptions::flat()).is_err());
        let r = check_barycenter_contraction(&e, &a, &a, KarcherOptions::flat()).unwrap();
        assert_eq!(r.lhs, 0.0);
    }
}
