//! Inductive means of a periodic SPD sequence converge to the Karcher mean
//! of one period.
//!
//! ```text
//! cargo run --example holbrook -- [seed]
//! ```

use hadamard_ergodic::ergodic::{ergodic_inductive_run, KroneckerSystem, ReferenceOptions};
use hadamard_ergodic::functions::cyclic_atoms;
use hadamard_ergodic::means::{karcher_mean, sequence_diameter, EmpiricalMeasure, KarcherOptions};
use hadamard_ergodic::spaces::{SampleSpace, Spd};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hadamard_ergodic::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let spd = Spd::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<_> = (0..3).map(|_| spd.sample_point(&mut rng)).collect();
    let diameter = sequence_diameter(&atoms, &spd)?;
    let karcher = karcher_mean(&spd, &EmpiricalMeasure::uniform(atoms.clone())?, KarcherOptions::default())?;

    let system = KroneckerSystem::cyclic(3, 1)?;
    let f = cyclic_atoms(atoms);
    let start = system.identity();
    let trace = ergodic_inductive_run(&spd, &system, &f, &start, 10_000, Some(&karcher.point), ReferenceOptions::default())?;

    println!("diameter of the atoms: {diameter:.4}");
    println!("{:>6}  {:>12}", "n", "delta");
    for e in &trace.entries {
        println!("{:>6}  {:>12.3e}", e.n, e.delta_to_reference);
    }
    println!("visits per atom: {:?}", trace.visit_counts.unwrap_or_default());
    Ok(())
}
