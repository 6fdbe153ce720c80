//! Mollifying a step function: the L¹ error shrinks with η, and truncation
//! removes far excursions at an L¹ cost.

use hadamard_ergodic::ergodic::{KroneckerSystem, OrbitFunction, Regularity};
use hadamard_ergodic::functions::step_from_directions;
use hadamard_ergodic::mollify::{l1_distance, mollified_function, truncate, MollifierConfig};
use hadamard_ergodic::spaces::{ModelSpace, Spd};

fn main() -> hadamard_ergodic::Result<()> {
    let spd = Spd::new(3);
    let system = KroneckerSystem::golden_rotation();
    let f = step_from_directions(&spd, vec![0.0, 0.4142], &[spd.default_direction()], 1.0)?;

    println!("{:>6}  {:>10}", "eta", "L1(A, A_eta)");
    for eta in [0.2, 0.1, 0.05, 0.01] {
        let fe = mollified_function(&spd, &system, &f, MollifierConfig::new(eta, 64))?;
        println!("{eta:>6}  {:>10.4}", l1_distance(&spd, &system, &f, &fe, 10_000)?);
    }

    let base = spd.base_point();
    let far = spd.along(&spd.default_direction(), 10.0)?;
    let spike = {
        let (base, far) = (base.clone(), far.clone());
        OrbitFunction::new(Regularity::L1, move |g| Ok(if g.torus_coord(0)? < 0.05 { far.clone() } else { base.clone() }))
    };
    for radius in [5.0, 20.0] {
        let t = truncate(&spd, &spike, base.clone(), radius)?;
        println!("truncation at N = {radius}: L1 cost {:.4}", l1_distance(&spd, &system, &spike, &t, 10_000)?);
    }
    Ok(())
}
