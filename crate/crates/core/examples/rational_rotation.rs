//! A rotation by 1/4 is not ergodic: orbits stay in one coset and the
//! inductive means settle on the wrong point.

use hadamard_ergodic::ergodic::{ergodic_inductive_run, GroupElement, KroneckerSystem, ReferenceOptions};
use hadamard_ergodic::functions::coset_sign;
use hadamard_ergodic::spaces::{ModelSpace, Spd};

fn main() -> hadamard_ergodic::Result<()> {
    let spd = Spd::new(3);
    let system = KroneckerSystem::torus(vec![0.25], false)?;
    let f = coset_sign(&spd, spd.default_direction(), 4, 1.0);
    for x in [0.05, 0.2, 0.3] {
        let t = ergodic_inductive_run(&spd, &system, &f, &GroupElement::Torus(vec![x]), 10_000, None, ReferenceOptions::default())?;
        println!("start {x}: delta to the barycenter after 1e4 steps = {:.4}", t.final_delta());
        for w in &t.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
