//! Karcher means in the hyperboloid and in SPD(3), with the variance
//! inequality checked at random test points.

use hadamard_ergodic::means::{check_variance_inequality, karcher_mean, EmpiricalMeasure, KarcherOptions};
use hadamard_ergodic::spaces::{Hyperboloid, ModelSpace, Spd};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn show<S: ModelSpace>(name: &str, space: &S, rng: &mut ChaCha8Rng) -> hadamard_ergodic::Result<()> {
    let atoms: Vec<_> = (0..8).map(|_| space.sample_point(rng)).collect();
    let weights: Vec<f64> = (0..8).map(|_| rng.gen_range(0.1..1.0)).collect();
    let mu = EmpiricalMeasure::new(atoms, weights)?;
    let b = karcher_mean(space, &mu, KarcherOptions::default())?;
    println!("{name}: {} iterations, converged {}, objective {:.6}", b.iterations, b.converged, b.objective);
    println!("  barycenter {}", space.point_to_json(&b.point));
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let z = space.sample_point(rng);
        worst = worst.min(check_variance_inequality(&mu, space, &z, &b.point)?.slack);
    }
    println!("  smallest variance-inequality slack over 100 points: {worst:.4e}");
    Ok(())
}

fn main() -> hadamard_ergodic::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    show("hyperboloid:2", &Hyperboloid::new(2), &mut rng)?;
    show("spd:3", &Spd::new(3), &mut rng)?;
    Ok(())
}
