//! Inductive means: arithmetic means in ℝⁿ, order-dependent in SPD(3).

use hadamard_ergodic::means::{inductive_mean, inductive_prefixes, karcher_mean, EmpiricalMeasure, KarcherOptions};
use hadamard_ergodic::spaces::{Euclidean, SampleSpace, Spd};
use hadamard_ergodic::HadamardSpace;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hadamard_ergodic::Result<()> {
    let e = Euclidean::new(1);
    let seq: Vec<_> = [0.0, 3.0, 6.0].iter().map(|&v| e.point(&[v])).collect::<Result<_, _>>()?;
    let prefixes: Vec<f64> = inductive_prefixes(&e, &seq)?.iter().map(|p| p[0]).collect();
    println!("S_n of (0, 3, 6) in R: {prefixes:?}");

    let spd = Spd::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let triple: Vec<_> = (0..3).map(|_| spd.sample_point(&mut rng)).collect();
    let forward = inductive_mean(&spd, &triple)?;
    let backward = inductive_mean(&spd, &triple.iter().rev().cloned().collect::<Vec<_>>())?;
    let karcher = karcher_mean(&spd, &EmpiricalMeasure::uniform(triple)?, KarcherOptions::default())?;
    println!("SPD(3) triple:");
    println!("  d(S_3, S_3 reversed)   = {:.4e}", spd.distance(&forward, &backward)?);
    println!("  d(S_3, Karcher mean)   = {:.4e}", spd.distance(&forward, &karcher.point)?);
    println!("  d(S_3 reversed, mean)  = {:.4e}", spd.distance(&backward, &karcher.point)?);
    Ok(())
}
