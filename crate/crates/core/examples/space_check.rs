//! Runs the four comparison inequalities on seeded samples of each space,
//! including a deliberately non-CAT(0) one.
//!
//! ```text
//! cargo run --example space_check -- [samples]
//! ```

use hadamard_ergodic::spaces::{BentEuclidean, Euclidean, Hyperboloid, SampleSpace, Spd};
use hadamard_ergodic::suite::axiom_suite;
use hadamard_ergodic::Tolerance;

fn report<S: SampleSpace>(name: &str, space: &S, samples: usize) -> hadamard_ergodic::Result<()> {
    for t in axiom_suite(space, samples, 1, Tolerance::default())? {
        println!("{name:<14} {:<22} {:>5} violations  min slack {:>10.3e}", t.checker, t.violations, t.min_slack);
    }
    Ok(())
}

fn main() -> hadamard_ergodic::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    report("euclid:4", &Euclidean::new(4), samples)?;
    report("spd:3", &Spd::new(3), samples)?;
    report("hyperboloid:3", &Hyperboloid::new(3), samples)?;
    report("broken:4", &BentEuclidean::new(4), samples)?;
    Ok(())
}
