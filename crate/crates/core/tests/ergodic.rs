//! Kronecker systems, orbit averages and the ergodic driver.

use hadamard_ergodic::ergodic::{
    birkhoff_average, check_orbit_contraction, checkpoints, ergodic_inductive_run, estimate_pushforward_barycenter,
    golden_alpha, trace_against, GroupElement, KroneckerSystem, OrbitFunction, ReferenceOptions, Regularity,
};
use hadamard_ergodic::functions::{coset_sign, cyclic_atoms, sine, step_from_directions};
use hadamard_ergodic::means::{karcher_mean, sequence_diameter, EmpiricalMeasure, KarcherOptions};
use hadamard_ergodic::spaces::{Euclidean, EuclideanPoint, ModelSpace, SampleSpace, Spd, SpdPoint};
use hadamard_ergodic::HadamardSpace;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn torus(x: f64) -> GroupElement {
    GroupElement::Torus(vec![x])
}

fn x0(g: &GroupElement) -> f64 {
    g.torus_coord(0).unwrap()
}

/// `n·α + x` mod 1 in exact integer arithmetic, for `α, x` multiples of `2^-53`.
fn exact_orbit_point(alpha: f64, x: f64, n: u64) -> f64 {
    const SCALE: f64 = (1u64 << 53) as f64;
    let (a, s) = ((alpha * SCALE) as u128, (x * SCALE) as u128);
    assert_eq!(a as f64, alpha * SCALE);
    assert_eq!(s as f64, x * SCALE);
    let r = (s + n as u128 * a) % (1u128 << 53);
    r as f64 / SCALE
}

#[test]
fn golden_orbit_does_not_drift() {
    let alpha = golden_alpha();
    assert!((0.5..1.0).contains(&alpha));
    let sys = KroneckerSystem::golden_rotation();
    for start in [0.0, 0.123_456_789_012_345_68, 0.999_999_999] {
        let start = (start * (1u64 << 53) as f64).floor() / (1u64 << 53) as f64;
        let mut worst: f64 = 0.0;
        for (n, g) in sys.orbit_iter(&torus(start)).unwrap().take(1_000_000).enumerate() {
            let exact = exact_orbit_point(alpha, start, n as u64);
            worst = worst.max(sys.metric(&g, &torus(exact)).unwrap());
        }
        assert!(worst < 1e-10, "drift {worst:e} from start {start}");
    }
}

#[test]
fn golden_orbit_is_equidistributed() {
    let sys = KroneckerSystem::golden_rotation();
    let mut bins = [0usize; 10];
    for g in sys.orbit(&torus(0.0), 10_000).unwrap() {
        bins[(x0(&g) * 10.0) as usize] += 1;
    }
    for b in bins {
        assert!((b as f64 / 1000.0 - 1.0).abs() <= 0.03, "{bins:?}");
    }
}

#[test]
fn birkhoff_average_of_an_interval_indicator() {
    let sys = KroneckerSystem::golden_rotation();
    for start in sys.haar_samples(1, 5) {
        let avg = birkhoff_average(&sys, |g| if x0(g) < 0.3 { 1.0 } else { 0.0 }, &start, 100_000).unwrap();
        assert!((avg - 0.3).abs() <= 0.01, "{avg}");
    }
}

#[test]
fn rational_rotation_has_period_four() {
    let sys = KroneckerSystem::torus(vec![0.25], false).unwrap();
    let orbit = sys.orbit(&torus(0.1), 9).unwrap();
    assert!(sys.metric(&orbit[0], &orbit[4]).unwrap() < 1e-15);
    assert!(sys.metric(&orbit[0], &orbit[8]).unwrap() < 1e-15);
    assert!(!sys.is_ergodic());
}

#[test]
fn cyclic_orbits() {
    let sys = KroneckerSystem::cyclic(6, 5).unwrap();
    let res: Vec<u64> = sys.orbit(&GroupElement::Cyclic(2), 7).unwrap().iter().map(|g| g.residue().unwrap()).collect();
    assert_eq!(res, vec![2, 1, 0, 5, 4, 3, 2]);
    assert!(sys.is_ergodic());
    assert!(!KroneckerSystem::cyclic(6, 2).unwrap().is_ergodic());
    assert!(KroneckerSystem::cyclic(0, 1).is_err());
    assert_eq!(sys.metric(&GroupElement::Cyclic(0), &GroupElement::Cyclic(5)).unwrap(), 1.0 / 6.0);
    assert_eq!(sys.metric(&GroupElement::Cyclic(0), &GroupElement::Cyclic(3)).unwrap(), 0.5);
}

#[test]
fn torus_metric_examples() {
    let sys = KroneckerSystem::torus(vec![0.1, 0.2], true).unwrap();
    let a = GroupElement::Torus(vec![0.05, 0.5]);
    let b = GroupElement::Torus(vec![0.95, 0.25]);
    // first axis wraps: min(0.9, 0.1) = 0.1; second: 0.25
    assert!((sys.metric(&a, &b).unwrap() - 0.25).abs() < 1e-15);
    assert!(sys.metric(&a, &torus(0.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn group_metric_is_shift_invariant(a in 0.0f64..1.0, b in 0.0f64..1.0, h in 0.0f64..1.0, i in 0u64..97, j in 0u64..97, k in 0u64..97) {
        let sys = KroneckerSystem::golden_rotation();
        let (ga, gb, gh) = (torus(a), torus(b), torus(h));
        let d = sys.metric(&ga, &gb).unwrap();
        let ds = sys.metric(&sys.add(&ga, &gh).unwrap(), &sys.add(&gb, &gh).unwrap()).unwrap();
        prop_assert!((d - ds).abs() <= 1e-15, "{d} vs {ds}");

        let cyc = KroneckerSystem::cyclic(97, 3).unwrap();
        let (ci, cj, ck) = (GroupElement::Cyclic(i), GroupElement::Cyclic(j), GroupElement::Cyclic(k));
        let d = cyc.metric(&ci, &cj).unwrap();
        prop_assert_eq!(d, cyc.metric(&cyc.add(&ci, &ck).unwrap(), &cyc.add(&cj, &ck).unwrap()).unwrap());
    }

    #[test]
    fn dyadic_shifts_are_exactly_invariant(a in 0u32..1024, b in 0u32..1024, h in 0u32..1024) {
        let sys = KroneckerSystem::golden_rotation();
        let f = |v: u32| torus(v as f64 / 1024.0);
        let d = sys.metric(&f(a), &f(b)).unwrap();
        let ds = sys.metric(&sys.add(&f(a), &f(h)).unwrap(), &sys.add(&f(b), &f(h)).unwrap()).unwrap();
        prop_assert_eq!(d, ds);
    }
}

// ---------------------------------------------------------------- ergodic driver

#[test]
fn identity_function_pushforward_is_one_half() {
    let e = Euclidean::new(1);
    let sys = KroneckerSystem::golden_rotation();
    let f = OrbitFunction::new(Regularity::L1, |g| Ok(EuclideanPoint::from_element(1, g.torus_coord(0)?)));
    let b = estimate_pushforward_barycenter(&e, &sys, &f, 10_000, KarcherOptions::flat()).unwrap();
    assert!((b.point[0] - 0.5).abs() <= 1e-3);
    let trace = ergodic_inductive_run(&e, &sys, &f, &torus(0.3), 100_000, None, ReferenceOptions::default()).unwrap();
    assert!(trace.final_delta() <= 1e-3);
}

#[test]
fn euclidean_sine_average_vanishes() {
    let e = Euclidean::new(1);
    let sys = KroneckerSystem::golden_rotation();
    let f = sine(&e, e.default_direction(), 1.0);
    let trace = ergodic_inductive_run(&e, &sys, &f, &torus(0.0), 100_000, None, ReferenceOptions::default()).unwrap();
    assert!(trace.reference[0].abs() < 1e-12);
    assert!(trace.final_delta() <= 0.01);
    let marks: Vec<usize> = trace.entries.iter().map(|t| t.n).collect();
    assert_eq!(marks, checkpoints(100_000));
    // the Birkhoff sum gives the same number
    let direct = birkhoff_average(&sys, |g| (std::f64::consts::TAU * x0(g)).sin(), &torus(0.0), 100_000).unwrap();
    assert!((trace.entries.last().unwrap().point[0] - direct).abs() < 1e-12);
}

#[test]
fn commuting_spd_sine_reference_is_the_exponential_of_the_mean() {
    let spd = Spd::new(3);
    let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.5, -0.5]));
    let sys = KroneckerSystem::golden_rotation();
    let f = sine(&spd, d, 1.0);
    let b = estimate_pushforward_barycenter(&spd, &sys, &f, 10_000, KarcherOptions::default()).unwrap();
    // exp(c·D) with c the grid mean of sin(2πx)
    let c: f64 = (0..10_000).map(|i| (std::f64::consts::TAU * (i as f64 + 0.5) / 1e4).sin()).sum::<f64>() / 1e4;
    let oracle = SpdPoint::from_diagonal(&[c.exp(), (0.5 * c).exp(), (-0.5 * c).exp()]).unwrap();
    assert!(spd.distance(&b.point, &oracle).unwrap() < 1e-8);

    for start in sys.haar_samples(3, 3) {
        let t = trace_against(&spd, &sys, &f, &start, 20_000, b.point.clone(), vec![]).unwrap();
        assert!(t.final_delta() <= 0.05);
        assert!(t.final_delta() < t.delta_at(100).unwrap());
    }
}

#[test]
fn two_valued_step_reference_lies_on_the_geodesic() {
    let spd = Spd::new(3);
    let sys = KroneckerSystem::golden_rotation();
    let dir = spd.default_direction();
    let f = step_from_directions(&spd, vec![0.0, 0.4], &[dir], 1.0).unwrap();
    let b = estimate_pushforward_barycenter(&spd, &sys, &f, 10_000, KarcherOptions::default()).unwrap();
    let base = spd.base_point();
    let far = f.evaluate(&torus(0.5)).unwrap();
    assert!((spd.distance(&base, &far).unwrap() - 1.0).abs() < 1e-12);
    let oracle = spd.geodesic(&base, &far, 0.6).unwrap();
    assert!(spd.distance(&b.point, &oracle).unwrap() < 1e-8);
    let t = trace_against(&spd, &sys, &f, &torus(0.77), 100_000, b.point, vec![]).unwrap();
    assert!(t.final_delta() <= 0.05);
}

#[test]
fn holbrook_limit_for_three_spd_atoms() {
    let spd = Spd::new(3).with_sample_condition(100.0).unwrap();
    let sys = KroneckerSystem::cyclic(3, 1).unwrap();
    for seed in 1..=3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms: Vec<SpdPoint> = (0..3).map(|_| spd.sample_point(&mut rng)).collect();
        for a in &atoms {
            assert!(a.condition_number().unwrap() <= 100.0 * (1.0 + 1e-9));
        }
        let k = karcher_mean(&spd, &EmpiricalMeasure::uniform(atoms.clone()).unwrap(), KarcherOptions::new(1e-12, 1000)).unwrap();
        let diameter = sequence_diameter(&atoms, &spd).unwrap();
        let f = cyclic_atoms(atoms);
        let t = trace_against(&spd, &sys, &f, &GroupElement::Cyclic(0), 10_000, k.point, vec![]).unwrap();
        let (d100, d_end) = (t.delta_at(100).unwrap(), t.final_delta());
        assert!(d_end <= 0.05 * diameter, "seed {seed}: {d_end} vs Δ = {diameter}");
        assert!(d_end <= 0.25 * d100, "seed {seed}: {d_end} vs {d100}");
        assert_eq!(t.visit_counts.as_deref(), Some(&[3334u64, 3333, 3333][..]));
    }
}

#[test]
fn cyclic_visit_counts_are_balanced_over_full_periods() {
    let e = Euclidean::new(1);
    let sys = KroneckerSystem::cyclic(5, 2).unwrap();
    let atoms: Vec<_> = (0..5).map(|i| e.point(&[i as f64]).unwrap()).collect();
    let f = cyclic_atoms(atoms);
    let t = trace_against(&e, &sys, &f, &GroupElement::Cyclic(3), 500, e.point(&[2.0]).unwrap(), vec![]).unwrap();
    assert_eq!(t.visit_counts.as_deref(), Some(&[100u64; 5][..]));
    // arithmetic mean of 0..5 after whole periods
    assert!(t.final_delta() < 1e-12);
}

#[test]
fn rational_rotation_converges_to_the_coset_barycenter() {
    let e = Euclidean::new(1);
    let sys = KroneckerSystem::torus(vec![0.25], false).unwrap();
    let f = coset_sign(&e, e.default_direction(), 4, 1.0);
    let b = estimate_pushforward_barycenter(&e, &sys, &f, 10_000, KarcherOptions::flat()).unwrap();
    assert!(b.point[0].abs() < 1e-12);
    // a start in [0, 1/8) stays on the + level set
    let t = ergodic_inductive_run(&e, &sys, &f, &torus(0.05), 10_000, None, ReferenceOptions::default()).unwrap();
    assert!((t.final_delta() - 1.0).abs() < 1e-12);
    assert!(t.warnings.iter().any(|w| w.contains("not ergodic")));
}

#[test]
fn orbit_contraction_examples() {
    let sys = KroneckerSystem::golden_rotation();
    let e = Euclidean::new(1);
    let a = sine(&e, e.default_direction(), 1.0);
    let r = check_orbit_contraction(&e, &sys, &a, &a, &torus(0.2), 1000, 0.0, 1000).unwrap();
    assert_eq!(r.lhs, 0.0);

    let shifted = {
        let a = a.clone();
        OrbitFunction::new(Regularity::Continuous, move |g| Ok(a.evaluate(g)? + DVector::from_element(1, 0.3)))
    };
    let r = check_orbit_contraction(&e, &sys, &a, &shifted, &torus(0.2), 1000, 1e-9, 1000).unwrap();
    assert!((r.lhs - 0.3).abs() < 1e-12 && (r.rhs - 0.3).abs() < 2e-9);

    let spd = Spd::new(3);
    let s = sine(&spd, spd.default_direction(), 1.0);
    let st = step_from_directions(&spd, vec![0.0, 0.5], &[spd.default_direction()], 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        let start = torus(rng.gen());
        let r = check_orbit_contraction(&spd, &sys, &s, &st, &start, 10_000, 0.01, 10_000).unwrap();
        assert!(r.holds, "{r:?}");
    }
}

#[test]
fn driver_rejects_bad_input() {
    let e = Euclidean::new(1);
    let sys = KroneckerSystem::golden_rotation();
    let f = sine(&e, e.default_direction(), 1.0);
    assert!(ergodic_inductive_run(&e, &sys, &f, &torus(0.0), 0, None, ReferenceOptions::default()).is_err());
    assert!(ergodic_inductive_run(&e, &sys, &f, &GroupElement::Cyclic(0), 10, None, ReferenceOptions::default()).is_err());
    let bad_ref = e.point(&[0.0]).unwrap();
    let wrong_dim = EuclideanPoint::zeros(2);
    assert!(ergodic_inductive_run(&e, &sys, &f, &torus(0.0), 10, Some(&wrong_dim), ReferenceOptions::default()).is_err());
    assert!(ergodic_inductive_run(&e, &sys, &f, &torus(0.0), 10, Some(&bad_ref), ReferenceOptions::default()).is_ok());
}
