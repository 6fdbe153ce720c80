//! A discontinuous SPD-valued step function averaged along golden-rotation
//! orbits from several random starts.

use hadamard_ergodic::ergodic::{estimate_pushforward_barycenter, trace_against, KroneckerSystem};
use hadamard_ergodic::functions::step_from_directions;
use hadamard_ergodic::means::KarcherOptions;
use hadamard_ergodic::spaces::{ModelSpace, Spd};

fn main() -> hadamard_ergodic::Result<()> {
    let spd = Spd::new(3);
    let system = KroneckerSystem::golden_rotation();
    let f = step_from_directions(&spd, vec![0.0, 0.4142], &[spd.default_direction()], 1.0)?;
    let reference = estimate_pushforward_barycenter(&spd, &system, &f, 10_000, KarcherOptions::default())?.point;

    println!("{:>8}  {:>12}  {:>12}", "start", "delta(100)", "delta(1e5)");
    for start in system.haar_samples(5, 8) {
        let t = trace_against(&spd, &system, &f, &start, 100_000, reference.clone(), vec![])?;
        let x = start.torus_coord(0)?;
        println!("{x:>8.4}  {:>12.3e}  {:>12.3e}", t.delta_at(100).unwrap_or(f64::NAN), t.final_delta());
    }
    Ok(())
}
