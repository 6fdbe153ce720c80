//! Named test functions `A: G → M` used by experiments and examples.
//!
//! Torus functions read the first coordinate of the group element only.

use std::f64::consts::TAU;
use std::sync::Arc;

use crate::ergodic::{GroupElement, OrbitFunction, Regularity};
use crate::error::{argument, Result};
use crate::spaces::ModelSpace;

/// `A ≡ p`.
pub fn constant<P>(p: P) -> OrbitFunction<P>
where
    P: Clone + Send + Sync + 'static,
{
    OrbitFunction::new(Regularity::Continuous, move |_| Ok(p.clone()))
}

fn ray<S>(space: &S, direction: S::Tangent, profile: impl Fn(f64) -> f64 + Send + Sync + 'static, regularity: Regularity) -> OrbitFunction<S::Point>
where
    S: ModelSpace + Clone + Send + Sync + 'static,
    S::Tangent: Send + Sync + 'static,
{
    let space = space.clone();
    OrbitFunction::new(regularity, move |g| space.along(&direction, profile(g.torus_coord(0)?)))
}

/// `A(g) = exp_base(amplitude · sin(2πg) · direction)`. In ℝ¹ with the default
/// direction this is `sin(2πg)`; in SPD(n) with a symmetric `D` it is `exp(sin(2πg)·D)`.
pub fn sine<S>(space: &S, direction: S::Tangent, amplitude: f64) -> OrbitFunction<S::Point>
where
    S: ModelSpace + Clone + Send + Sync + 'static,
    S::Tangent: Send + Sync + 'static,
{
    ray(space, direction, move |x| amplitude * (TAU * x).sin(), Regularity::Continuous)
}

/// `A(g) = exp_base(g · direction)` with `g ∈ [0,1)`; discontinuous at 0 on the circle.
pub fn identity<S>(space: &S, direction: S::Tangent) -> OrbitFunction<S::Point>
where
    S: ModelSpace + Clone + Send + Sync + 'static,
    S::Tangent: Send + Sync + 'static,
{
    ray(space, direction, |x| x, Regularity::L1)
}

/// Piecewise constant on the circle: `values[i]` on `[breaks[i], breaks[i+1])`,
/// the last piece wrapping around to `breaks[0]`.
pub fn step<P>(breaks: Vec<f64>, values: Vec<P>) -> Result<OrbitFunction<P>>
where
    P: Clone + Send + Sync + 'static,
{
    if breaks.is_empty() || breaks.len() != values.len() {
        return Err(argument("a step function needs as many break points as values"));
    }
    if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks[0] < 0.0 || *breaks.last().unwrap() >= 1.0 {
        return Err(argument("break points must be strictly increasing inside [0, 1)"));
    }
    let values: Arc<[P]> = values.into();
    Ok(OrbitFunction::new(Regularity::Stepwise, move |g| {
        let x = g.torus_coord(0)?;
        let k = breaks.partition_point(|&b| b <= x);
        let idx = if k == 0 { breaks.len() - 1 } else { k - 1 };
        Ok(values[idx].clone())
    }))
}

/// Two- or more-piece step function whose first value is the base point and
/// whose other values sit at distance `jump` from it along the given unit directions.
pub fn step_from_directions<S>(space: &S, breaks: Vec<f64>, directions: &[S::Tangent], jump: f64) -> Result<OrbitFunction<S::Point>>
where
    S: ModelSpace,
    S::Point: Send + Sync + 'static,
{
    let mut values = vec![space.base_point()];
    for d in directions {
        let n = space.norm(&space.base_point(), d);
        if !(n > 0.0) {
            return Err(argument("step directions must be nonzero"));
        }
        values.push(space.along(d, jump / n)?);
    }
    step(breaks, values)
}

/// `A(g) = exp_base(±amplitude · direction)` with the sign `+` when
/// `frac(modulus · g) < ½`. A rotation by `1/modulus` never leaves the level
/// set it starts on, so its inductive means converge to the wrong point.
pub fn coset_sign<S>(space: &S, direction: S::Tangent, modulus: u32, amplitude: f64) -> OrbitFunction<S::Point>
where
    S: ModelSpace + Clone + Send + Sync + 'static,
    S::Tangent: Send + Sync + 'static,
{
    let m = modulus as f64;
    let profile = move |x: f64| {
        let y = m * x;
        if y - y.floor() < 0.5 {
            amplitude
        } else {
            -amplitude
        }
    };
    ray(space, direction, profile, Regularity::Stepwise)
}

/// `A(k) = atoms[k]` on `ℤ/dℤ`.
pub fn cyclic_atoms<P>(atoms: Vec<P>) -> OrbitFunction<P>
where
    P: Clone + Send + Sync + 'static,
{
    let atoms: Arc<[P]> = atoms.into();
    OrbitFunction::new(Regularity::Continuous, move |g| {
        let k = g.residue()? as usize;
        atoms.get(k).cloned().ok_or_else(|| argument(format!("residue {k} has no atom")))
    })
}

/// Evaluates `f` at the torus point `x` (first coordinate).
pub fn at<P>(f: &OrbitFunction<P>, x: f64) -> Result<P> {
    f.evaluate(&GroupElement::Torus(vec![x]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HadamardSpace;
    use crate::spaces::{Euclidean, Spd};

    #[test]
    fn step_pieces_and_wraparound() {
        let f = step(vec![0.2, 0.5], vec!["a", "b"]).unwrap();
        assert_eq!(at(&f, 0.1).unwrap(), "b");
        assert_eq!(at(&f, 0.2).unwrap(), "a");
        assert_eq!(at(&f, 0.49).unwrap(), "a");
        assert_eq!(at(&f, 0.5).unwrap(), "b");
        assert!(step(vec![0.5, 0.2], vec![1, 2]).is_err());
        assert!(step(vec![0.5], vec![1, 2]).is_err());
    }

    #[test]
    fn sine_in_euclidean_line() {
        let e = Euclidean::new(1);
        let f = sine(&e, e.default_direction(), 1.0);
        assert!((at(&f, 0.25).unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn step_jump_has_requested_size() {
        let s = Spd::new(3);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
        let u = s.sample_unit_tangent(&mut rng);
        let f = step_from_directions(&s, vec![0.0, 0.5], &[u], 1.0).unwrap();
        let d = s.distance(&at(&f, 0.1).unwrap(), &at(&f, 0.7).unwrap()).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coset_sign_is_constant_on_quarter_orbits() {
        let e = Euclidean::new(1);
        let f = coset_sign(&e, e.default_direction(), 4, 1.0);
        for k in 0..4 {
            assert_eq!(at(&f, 0.1 + 0.25 * k as f64).unwrap()[0], 1.0);
            assert_eq!(at(&f, 0.15 + 0.25 * k as f64).unwrap()[0], -1.0);
        }
    }
}
