//! Seeded batteries of the inequality checkers.
//!
//! Each battery draws random configurations from a [`SampleSpace`], runs one
//! checker per configuration and tallies violations. The CLI `space-check`
//! command and the test suites share these.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{
    check_convexity_of_distance, check_geodesic_convexity, check_reshetnyak, check_semiparallelogram, InequalitySlack,
    Tolerance,
};
use crate::means::{
    check_contraction, check_diameter_bound, check_variance_inequality, check_weighted_inequality, karcher_mean,
    EmpiricalMeasure, KarcherOptions,
};
use crate::mollify::check_barycenter_contraction;
use crate::spaces::{ModelSpace, SampleSpace};

/// Violation count for one checker over a batch of samples.
#[derive(Debug, Clone, Serialize)]
pub struct CheckerTally {
    pub checker: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// Smallest `rhs − lhs` seen.
    pub min_slack: f64,
    /// Smallest `(rhs − lhs) / (1 + |rhs|)` seen.
    pub min_relative_slack: f64,
}

impl CheckerTally {
    fn new(checker: &'static str) -> Self {
        Self { checker, samples: 0, violations: 0, min_slack: f64::INFINITY, min_relative_slack: f64::INFINITY }
    }

    fn record(&mut self, r: &InequalitySlack, tol: Tolerance) {
        self.samples += 1;
        if !r.holds_with(tol) {
            self.violations += 1;
        }
        self.min_slack = self.min_slack.min(r.slack);
        self.min_relative_slack = self.min_relative_slack.min(r.slack / (1.0 + r.rhs.abs()));
    }
}

pub const AXIOM_CHECKERS: [&str; 4] = ["semiparallelogram", "geodesic_convexity", "convexity_of_distance", "reshetnyak"];

pub const LEMMA_CHECKERS: [&str; 5] =
    ["contraction", "weighted_inequality", "diameter_bound", "variance_inequality", "barycenter_contraction"];

/// Runs the four comparison inequalities on `samples` random configurations each.
pub fn axiom_suite<S: SampleSpace>(space: &S, samples: usize, seed: u64, tol: Tolerance) -> Result<Vec<CheckerTally>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies: Vec<CheckerTally> = AXIOM_CHECKERS.iter().map(|&c| CheckerTally::new(c)).collect();
    for _ in 0..samples {
        let mut p = || space.sample_point(&mut rng);
        let (x, y, z) = (p(), p(), p());
        tallies[0].record(&check_semiparallelogram(space, &x, &y, &z)?, tol);

        let (x, y, z) = (p(), p(), p());
        let t = rng.gen::<f64>();
        tallies[1].record(&check_geodesic_convexity(space, &x, &y, &z, t)?, tol);

        let mut p = || space.sample_point(&mut rng);
        let (a, a2, b, b2) = (p(), p(), p(), p());
        let t = rng.gen::<f64>();
        tallies[2].record(&check_convexity_of_distance(space, &a, &a2, &b, &b2, t)?, tol);

        let mut p = || space.sample_point(&mut rng);
        let (x1, x2, x3, x4) = (p(), p(), p(), p());
        tallies[3].record(&check_reshetnyak(space, &x1, &x2, &x3, &x4)?, tol);
    }
    Ok(tallies)
}

/// Sequence and measure sizes used by [`lemma_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LemmaShape {
    pub contraction_len: usize,
    /// `(k, m)` for the three-term bound.
    pub weighted: (usize, usize),
    /// `(k, m)` for the diameter bound.
    pub diameter: (usize, usize),
    pub measure_atoms: usize,
}

impl Default for LemmaShape {
    fn default() -> Self {
        Self { contraction_len: 20, weighted: (10, 10), diameter: (20, 5), measure_atoms: 10 }
    }
}

/// Runs the mean and barycenter inequalities on `samples` random configurations each.
pub fn lemma_suite<S: ModelSpace>(
    space: &S,
    samples: usize,
    seed: u64,
    tol: Tolerance,
    shape: LemmaShape,
    karcher: KarcherOptions,
) -> Result<Vec<CheckerTally>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies: Vec<CheckerTally> = LEMMA_CHECKERS.iter().map(|&c| CheckerTally::new(c)).collect();
    let seq = |rng: &mut ChaCha8Rng, n: usize| -> Vec<S::Point> { (0..n).map(|_| space.sample_point(rng)).collect() };
    let weights = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(0.1..1.0)).collect() };
    for _ in 0..samples {
        let a = seq(&mut rng, shape.contraction_len);
        let b = seq(&mut rng, shape.contraction_len);
        tallies[0].record(&check_contraction(&a, &b, space)?, tol);

        let (k, m) = shape.weighted;
        let s = seq(&mut rng, k + m);
        let z = space.sample_point(&mut rng);
        tallies[1].record(&check_weighted_inequality(&s, &z, k, m, space)?, tol);

        let (k, m) = shape.diameter;
        let s = seq(&mut rng, k + m);
        tallies[2].record(&check_diameter_bound(&s, k, m, space)?, tol);

        let n = shape.measure_atoms;
        let mu = EmpiricalMeasure::new(seq(&mut rng, n), weights(&mut rng, n))?;
        let bary = karcher_mean(space, &mu, karcher)?;
        let z = space.sample_point(&mut rng);
        tallies[3].record(&check_variance_inequality(&mu, space, &z, &bary.point)?, tol);

        let w = weights(&mut rng, n);
        let ma = EmpiricalMeasure::new(seq(&mut rng, n), w.clone())?;
        let mb = EmpiricalMeasure::new(seq(&mut rng, n), w)?;
        tallies[4].record(&check_barycenter_contraction(space, &ma, &mb, karcher)?, tol);
    }
    Ok(tallies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{BentEuclidean, Euclidean};

    #[test]
    fn flat_space_has_no_violations() {
        let e = Euclidean::new(3);
        let t = axiom_suite(&e, 200, 1, Tolerance::default()).unwrap();
        assert!(t.iter().all(|c| c.samples == 200 && c.violations == 0), "{t:?}");
        let t = lemma_suite(&e, 30, 1, Tolerance::new(1e-6, 0.0), LemmaShape::default(), KarcherOptions::flat()).unwrap();
        assert!(t.iter().all(|c| c.violations == 0), "{t:?}");
    }

    #[test]
    fn bent_space_is_caught() {
        let b = BentEuclidean::new(3);
        let t = axiom_suite(&b, 200, 1, Tolerance::default()).unwrap();
        assert!(t.iter().map(|c| c.violations).sum::<usize>() > 0);
    }

    #[test]
    fn same_seed_same_tally() {
        let e = Euclidean::new(2);
        let a = axiom_suite(&e, 50, 9, Tolerance::default()).unwrap();
        let b = axiom_suite(&e, 50, 9, Tolerance::default()).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
