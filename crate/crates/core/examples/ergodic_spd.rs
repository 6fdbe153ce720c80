//! Inductive means of `exp(sin(2πg)·D)` along a golden-ratio rotation
//! approach the barycenter of the pushforward measure.
//!
//! ```text
//! cargo run --example ergodic_spd -- [n_max]
//! ```

use hadamard_ergodic::ergodic::{ergodic_inductive_run, GroupElement, KroneckerSystem, ReferenceOptions};
use hadamard_ergodic::functions::sine;
use hadamard_ergodic::spaces::Spd;
use nalgebra::DMatrix;

fn main() -> hadamard_ergodic::Result<()> {
    let n_max = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let spd = Spd::new(3);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.5, -0.5]));
    let f = sine(&spd, d, 1.0);
    let system = KroneckerSystem::golden_rotation();
    let t0 = std::time::Instant::now();
    let trace = ergodic_inductive_run(&spd, &system, &f, &GroupElement::Torus(vec![0.3]), n_max, None, ReferenceOptions::default())?;
    for e in &trace.entries {
        println!("{:>7}  {:.3e}", e.n, e.delta_to_reference);
    }
    println!("elapsed: {:.2?}", t0.elapsed());
    Ok(())
}
