use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{argument, Result};

/// `(√5 − 1)/2`, the golden-ratio rotation number.
pub fn golden_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// An element of a torus `ℝᵈ/ℤᵈ` (coordinates in `[0,1)`) or of `ℤ/dℤ`.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Torus(Vec<f64>),
    Cyclic(u64),
}

impl GroupElement {
    /// First torus coordinate, or `k/d` for a cyclic residue viewed on the circle.
    pub fn torus_coord(&self, i: usize) -> Result<f64> {
        match self {
            GroupElement::Torus(x) => x.get(i).copied().ok_or_else(|| argument("torus coordinate out of range")),
            GroupElement::Cyclic(_) => Err(argument("expected a torus element, got a cyclic residue")),
        }
    }

    pub fn residue(&self) -> Result<u64> {
        match self {
            GroupElement::Cyclic(k) => Ok(*k),
            GroupElement::Torus(_) => Err(argument("expected a cyclic residue, got a torus element")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Torus { dim: usize },
    Cyclic { order: u64 },
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A compact abelian group with the translation `τ(h) = h + g`.
///
/// Ergodicity of a torus rotation cannot be decided in floating point; it is
/// recorded as asserted by the caller. Cyclic shifts are ergodic iff the
/// generator is coprime to the order.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerSystem {
    group: Group,
    shift: GroupElement,
    ergodic: bool,
}

/// Identity neighborhood sampled on a grid, used by the mollifier.
#[derive(Debug, Clone)]
pub struct Neighborhood {
    pub offsets: Vec<GroupElement>,
    /// Haar measure of the neighborhood.
    pub measure: f64,
    pub warnings: Vec<String>,
}

impl KroneckerSystem {
    pub fn torus(alpha: Vec<f64>, ergodic: bool) -> Result<Self> {
        if alpha.is_empty() {
            return Err(argument("torus rotation needs at least one coordinate"));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(argument("rotation vector must be finite"));
        }
        let dim = alpha.len();
        let shift = GroupElement::Torus(alpha.into_iter().map(frac).collect());
        Ok(Self { group: Group::Torus { dim }, shift, ergodic })
    }

    /// Rotation of the circle by the golden ratio, asserted ergodic.
    pub fn golden_rotation() -> Self {
        Self::torus(vec![golden_alpha()], true).expect("finite alpha")
    }

    pub fn cyclic(order: u64, generator: u64) -> Result<Self> {
        if order == 0 {
            return Err(argument("cyclic group order must be positive"));
        }
        let g = generator % order;
        let ergodic = gcd(g, order) == 1 || order == 1;
        Ok(Self { group: Group::Cyclic { order }, shift: GroupElement::Cyclic(g), ergodic })
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn shift(&self) -> &GroupElement {
        &self.shift
    }

    pub fn is_ergodic(&self) -> bool {
        self.ergodic
    }

    pub fn identity(&self) -> GroupElement {
        match self.group {
            Group::Torus { dim } => GroupElement::Torus(vec![0.0; dim]),
            Group::Cyclic { .. } => GroupElement::Cyclic(0),
        }
    }

    pub fn is_identity(&self, h: &GroupElement) -> bool {
        match h {
            GroupElement::Torus(x) => x.iter().all(|&v| v == 0.0),
            GroupElement::Cyclic(k) => *k == 0,
        }
    }

    pub fn contains(&self, h: &GroupElement) -> Result<()> {
        match (self.group, h) {
            (Group::Torus { dim }, GroupElement::Torus(x)) if x.len() == dim => {
                if x.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(argument("non-finite torus coordinate"))
                }
            }
            (Group::Cyclic { order }, GroupElement::Cyclic(k)) if *k < order => Ok(()),
            _ => Err(argument(format!("{h:?} is not an element of {:?}", self.group))),
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        match (self.group, a, b) {
            (Group::Torus { dim }, GroupElement::Torus(x), GroupElement::Torus(y)) if x.len() == dim && y.len() == dim => {
                Ok(GroupElement::Torus(x.iter().zip(y).map(|(p, q)| frac(p + q)).collect()))
            }
            (Group::Cyclic { order }, GroupElement::Cyclic(x), GroupElement::Cyclic(y)) => {
                Ok(GroupElement::Cyclic(((*x as u128 + *y as u128) % order as u128) as u64))
            }
            _ => Err(argument("group elements do not belong to this system")),
        }
    }

    /// `τ(h) = h + g`
    pub fn step(&self, h: &GroupElement) -> Result<GroupElement> {
        self.add(h, &self.shift)
    }

    /// Shift-invariant metric: `maxᵢ min(|xᵢ−yᵢ|, 1−|xᵢ−yᵢ|)` on the torus and the
    /// normalized circular distance `min(|i−j|, d−|i−j|)/d` on `ℤ/dℤ`.
    pub fn metric(&self, a: &GroupElement, b: &GroupElement) -> Result<f64> {
        match (a, b) {
            (GroupElement::Torus(x), GroupElement::Torus(y)) if x.len() == y.len() => Ok(x
                .iter()
                .zip(y)
                .map(|(p, q)| {
                    let d = (p - q).abs();
                    d.min(1.0 - d)
                })
                .fold(0.0, f64::max)),
            (GroupElement::Cyclic(i), GroupElement::Cyclic(j)) => {
                let Group::Cyclic { order } = self.group else {
                    return Err(argument("cyclic elements in a torus system"));
                };
                let d = i.abs_diff(*j) % order;
                Ok(d.min(order - d) as f64 / order as f64)
            }
            _ => Err(argument("group elements do not belong to the same group")),
        }
    }

    /// `[start, τ(start), …, τ^{n−1}(start)]`.
    pub fn orbit(&self, start: &GroupElement, n: usize) -> Result<Vec<GroupElement>> {
        if n == 0 {
            return Err(argument("orbit length must be at least 1"));
        }
        Ok(self.orbit_iter(start)?.take(n).collect())
    }

    /// Unbounded orbit iterator. Torus coordinates are advanced with compensated
    /// (Kahan) summation so the accumulated drift stays at round-off level.
    pub fn orbit_iter(&self, start: &GroupElement) -> Result<OrbitIter> {
        self.contains(start)?;
        Ok(match (self.group, start, &self.shift) {
            (Group::Torus { .. }, GroupElement::Torus(x), GroupElement::Torus(alpha)) => OrbitIter::Torus {
                x: x.iter().copied().map(frac).collect(),
                comp: vec![0.0; x.len()],
                alpha: alpha.clone(),
            },
            (Group::Cyclic { order }, GroupElement::Cyclic(k), GroupElement::Cyclic(g)) => {
                OrbitIter::Cyclic { k: *k, g: *g, order }
            }
            _ => unreachable!("contains() checked the element"),
        })
    }

    pub fn haar_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        match self.group {
            Group::Torus { dim } => GroupElement::Torus((0..dim).map(|_| rng.gen::<f64>()).collect()),
            Group::Cyclic { order } => GroupElement::Cyclic(rng.gen_range(0..order)),
        }
    }

    /// `count` Haar-random elements from a ChaCha stream seeded with `seed`.
    pub fn haar_samples(&self, seed: u64, count: usize) -> Vec<GroupElement> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.haar_sample(&mut rng)).collect()
    }

    /// Quadrature nodes for the Haar measure: the midpoint grid with
    /// `round(n^{1/d})` nodes per axis on the torus, every element on a cyclic group.
    pub fn quadrature_grid(&self, n: usize) -> Result<Vec<GroupElement>> {
        if n == 0 {
            return Err(argument("quadrature size must be at least 1"));
        }
        Ok(match self.group {
            Group::Torus { dim } => {
                let per_axis = ((n as f64).powf(1.0 / dim as f64).round() as usize).max(1);
                let axis: Vec<f64> = (0..per_axis).map(|i| (i as f64 + 0.5) / per_axis as f64).collect();
                product_grid(&axis, dim)
            }
            Group::Cyclic { order } => (0..order).map(GroupElement::Cyclic).collect(),
        })
    }

    /// Grid sample of the identity neighborhood used by the mollifier.
    ///
    /// On the torus this is the `d_G`-ball of radius `min(η, η^{1/d})/2`
    /// (measure and diameter both at most η), sampled by a midpoint grid of
    /// about `samples` nodes; a nonzero `seed` shifts the grid by a seeded
    /// offset inside one cell. On `ℤ/dℤ` the ball is enumerated exactly, and
    /// `η ≥ 1` yields the whole group together with a warning.
    pub fn neighborhood(&self, eta: f64, samples: usize, seed: u64) -> Result<Neighborhood> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(argument(format!("eta must be positive, got {eta}")));
        }
        if samples == 0 {
            return Err(argument("samples_per_eval must be at least 1"));
        }
        let mut warnings = Vec::new();
        match self.group {
            Group::Torus { dim } => {
                let radius = (eta.min(eta.powf(1.0 / dim as f64)) / 2.0).min(0.5);
                if radius >= 0.5 {
                    warnings.push(format!("eta = {eta} covers the whole torus"));
                }
                let per_axis = ((samples as f64).powf(1.0 / dim as f64).round() as usize).max(1);
                let cell = 2.0 * radius / per_axis as f64;
                let shift = if seed == 0 {
                    0.5
                } else {
                    ChaCha8Rng::seed_from_u64(seed).gen::<f64>()
                };
                let axis: Vec<f64> = (0..per_axis).map(|i| frac(-radius + (i as f64 + shift) * cell)).collect();
                Ok(Neighborhood { offsets: product_grid(&axis, dim), measure: (2.0 * radius).powi(dim as i32), warnings })
            }
            Group::Cyclic { order } => {
                let offsets: Vec<GroupElement> = if eta >= 1.0 {
                    warnings.push(format!("eta = {eta} >= 1: neighborhood is the whole cyclic group"));
                    (0..order).map(GroupElement::Cyclic).collect()
                } else {
                    let reach = ((eta / 2.0) * order as f64).floor() as u64;
                    (0..order).filter(|k| (*k).min(order - k) <= reach).map(GroupElement::Cyclic).collect()
                };
                let measure = offsets.len() as f64 / order as f64;
                Ok(Neighborhood { offsets, measure, warnings })
            }
        }
    }
}

fn product_grid(axis: &[f64], dim: usize) -> Vec<GroupElement> {
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(dim)];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(GroupElement::Torus).collect()
}

/// Iterator over `h, τ(h), τ²(h), …`.
#[derive(Debug, Clone)]
pub enum OrbitIter {
    Torus { x: Vec<f64>, comp: Vec<f64>, alpha: Vec<f64> },
    Cyclic { k: u64, g: u64, order: u64 },
}

impl Iterator for OrbitIter {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        match self {
            OrbitIter::Torus { x, comp, alpha } => {
                let out = GroupElement::Torus(x.clone());
                for i in 0..x.len() {
                    let y = alpha[i] - comp[i];
                    let mut t = x[i] + y;
                    comp[i] = (t - x[i]) - y;
                    // x + α < 2, so subtracting 1 is exact
                    if t >= 1.0 {
                        t -= 1.0;
                    }
                    x[i] = t;
                }
                Some(out)
            }
            OrbitIter::Cyclic { k, g, order } => {
                let out = GroupElement::Cyclic(*k);
                *k = ((*k as u128 + *g as u128) % *order as u128) as u64;
                Some(out)
            }
        }
    }
}
