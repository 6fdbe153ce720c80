//! Mollifiers, continuity moduli, L¹ distances and truncation.

use hadamard_ergodic::ergodic::{GroupElement, KroneckerSystem, OrbitFunction, Regularity};
use hadamard_ergodic::functions::{at, constant, sine, step_from_directions};
use hadamard_ergodic::means::{EmpiricalMeasure, KarcherOptions};
use hadamard_ergodic::mollify::{
    check_barycenter_contraction, check_mollifier_stability, continuity_modulus, l1_distance, mollified_function,
    mollify, truncate, Mollifier, MollifierConfig,
};
use hadamard_ergodic::spaces::{Euclidean, Hyperboloid, ModelSpace, SampleSpace, Spd, SpdPoint};
use hadamard_ergodic::HadamardSpace;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn torus(x: f64) -> GroupElement {
    GroupElement::Torus(vec![x])
}

fn spd_step(breaks: Vec<f64>) -> (Spd, OrbitFunction<SpdPoint>) {
    let spd = Spd::new(3);
    let f = step_from_directions(&spd, breaks, &[spd.default_direction()], 1.0).unwrap();
    (spd, f)
}

fn shifted<P: 'static>(f: &OrbitFunction<P>, sys: &KroneckerSystem, h: f64) -> OrbitFunction<P> {
    let (f, sys) = (f.clone(), sys.clone());
    OrbitFunction::new(f.regularity(), move |g| f.evaluate(&sys.add(g, &torus(h))?))
}

#[test]
fn constant_functions_are_fixed_points() {
    let spd = Spd::new(3);
    let sys = KroneckerSystem::golden_rotation();
    let p = SpdPoint::from_diagonal(&[1.0, 2.0, 3.0]).unwrap();
    let f = constant(p.clone());
    for eta in [0.3, 0.05] {
        let q = mollify(&spd, &sys, &f, MollifierConfig::new(eta, 32), &torus(0.4)).unwrap();
        assert!(spd.distance(&p, &q).unwrap() < 1e-10);
    }
    assert!(continuity_modulus(&spd, &sys, &f, &torus(0.1), 1, 100).unwrap() < 1e-12);
}

#[test]
fn euclidean_mollifier_is_a_sliding_window_average() {
    let e = Euclidean::new(1);
    let sys = KroneckerSystem::golden_rotation();
    let f = OrbitFunction::new(Regularity::L1, |g| Ok(e_point(g.torus_coord(0)?)));
    // linear away from the wrap: the window average is the center
    for g0 in [0.3, 0.5, 0.8] {
        let q = mollify(&e, &sys, &f, MollifierConfig::new(0.1, 64), &torus(g0)).unwrap();
        assert!((q[0] - g0).abs() < 1e-10);
    }
    // across the wrap, half the window sits near 1 and half near 0
    let q = mollify(&e, &sys, &f, MollifierConfig::new(0.1, 64), &torus(0.0)).unwrap();
    assert!((q[0] - 0.5).abs() < 1e-10);
}

fn e_point(x: f64) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_element(1, x)
}

#[test]
fn step_mollifier_away_from_breaks_is_exact() {
    let (spd, f) = spd_step(vec![0.0, 0.5]);
    let sys = KroneckerSystem::golden_rotation();
    for g0 in [0.1, 0.25, 0.4, 0.6, 0.9] {
        let q = mollify(&spd, &sys, &f, MollifierConfig::new(0.05, 64), &torus(g0)).unwrap();
        assert!(spd.distance(&q, &at(&f, g0).unwrap()).unwrap() < 1e-10);
    }
    // at a break, the value is the geodesic midpoint of the two pieces
    let q = mollify(&spd, &sys, &f, MollifierConfig::new(0.05, 64), &torus(0.5)).unwrap();
    let mid = spd.geodesic(&at(&f, 0.25).unwrap(), &at(&f, 0.75).unwrap(), 0.5).unwrap();
    assert!(spd.distance(&q, &mid).unwrap() < 1e-8);
}

#[test]
fn neighborhood_sizes() {
    let sys = KroneckerSystem::golden_rotation();
    let m = Mollifier::new(&sys, MollifierConfig::new(0.1, 64)).unwrap();
    assert!((m.neighborhood_measure() - 0.1).abs() < 1e-15);
    assert!(m.warnings().is_empty());
    // on T² the radius is min(η, √η)/2
    let t2 = KroneckerSystem::torus(vec![0.1, 0.2], true).unwrap();
    let m = Mollifier::new(&t2, MollifierConfig::new(0.1, 64)).unwrap();
    assert!((m.neighborhood_measure() - 0.01).abs() < 1e-15);
    let c = KroneckerSystem::cyclic(10, 1).unwrap();
    let m = Mollifier::new(&c, MollifierConfig::new(0.45, 1)).unwrap();
    // reach floor(0.225·10) = 2: {8, 9, 0, 1, 2}
    assert!((m.neighborhood_measure() - 0.5).abs() < 1e-15);
    let m = Mollifier::new(&c, MollifierConfig::new(2.0, 1)).unwrap();
    assert_eq!(m.neighborhood_measure(), 1.0);
    assert!(!m.warnings().is_empty());
    assert!(Mollifier::new(&sys, MollifierConfig::new(0.0, 8)).is_err());
    assert!(Mollifier::new(&sys, MollifierConfig::new(-1.0, 8)).is_err());
    assert!(Mollifier::new(&sys, MollifierConfig::new(0.1, 0)).is_err());
}

#[test]
fn continuity_modulus_of_a_step_is_twice_the_shift() {
    let (spd, f) = spd_step(vec![0.0, 0.3]);
    let sys = KroneckerSystem::golden_rotation();
    assert_eq!(continuity_modulus(&spd, &sys, &f, &torus(0.0), 1, 1000).unwrap(), 0.0);
    for h in [0.01, 0.02, 0.05] {
        // two breaks, jump of size 1
        let phi = continuity_modulus(&spd, &sys, &f, &torus(h), 1, 10_000).unwrap();
        assert!((phi - 2.0 * h).abs() < 1e-3, "h = {h}: {phi}");
        let phi2 = continuity_modulus(&spd, &sys, &f, &torus(h), 2, 10_000).unwrap();
        assert!((phi2 - 2.0 * h).abs() < 1e-3);
    }
    assert!(continuity_modulus(&spd, &sys, &f, &torus(0.1), 3, 10).is_err());
}

#[test]
fn continuity_modulus_of_the_identity() {
    let e = Euclidean::new(1);
    let sys = KroneckerSystem::golden_rotation();
    let f = OrbitFunction::new(Regularity::L1, |g| Ok(e_point(g.torus_coord(0)?)));
    // |x − frac(x+h)| is h except on [1−h, 1) where it is 1−h
    let h = 0.1;
    let oracle = (1.0 - h) * h + h * (1.0 - h);
    let phi = continuity_modulus(&e, &sys, &f, &torus(h), 1, 10_000).unwrap();
    assert!((phi - oracle).abs() < 1e-3, "{phi} vs {oracle}");
}

#[test]
fn l1_distance_examples() {
    let spd = Spd::new(3);
    let sys = KroneckerSystem::golden_rotation();
    let p = SpdPoint::identity(3);
    let q = SpdPoint::from_diagonal(&[2.0, 1.0, 1.0]).unwrap();
    let d = l1_distance(&spd, &sys, &constant(p.clone()), &constant(q.clone()), 100).unwrap();
    assert!((d - 2f64.ln()).abs() < 1e-12);
    let (_, f) = spd_step(vec![0.0, 0.25]);
    // differs from the constant base point on a set of measure 0.75 by 1
    let d = l1_distance(&spd, &sys, &f, &constant(p), 10_000).unwrap();
    assert!((d - 0.75).abs() < 1e-3);
}

#[test]
fn step_mollification_error_is_half_of_eta() {
    let (spd, f) = spd_step(vec![0.0, 0.4142]);
    let sys = KroneckerSystem::golden_rotation();
    let mut last = f64::INFINITY;
    for eta in [0.2, 0.1, 0.05, 0.01] {
        let fe = mollified_function(&spd, &sys, &f, MollifierConfig::new(eta, 64)).unwrap();
        let l1 = l1_distance(&spd, &sys, &f, &fe, 10_000).unwrap();
        // each break contributes ∫ (r − s)/(2r) over |s| < r, that is r/2 with r = η/2
        assert!((l1 - eta / 2.0).abs() <= 0.05 * eta, "eta {eta}: {l1}");
        assert!(l1 < last);
        last = l1;
    }
    assert!(last <= 0.02);
}

#[test]
fn continuous_mollification_converges_uniformly() {
    let spd = Spd::new(3);
    let sys = KroneckerSystem::golden_rotation();
    let f = sine(&spd, spd.default_direction(), 1.0);
    let grid = sys.quadrature_grid(200).unwrap();
    let mut last = f64::INFINITY;
    for eta in [0.2, 0.1, 0.05, 0.01] {
        let m = Mollifier::new(&sys, MollifierConfig::new(eta, 64)).unwrap();
        let mut worst: f64 = 0.0;
        for g in &grid {
            worst = worst.max(spd.distance(&f.evaluate(g).unwrap(), &m.apply(&spd, &f, g).unwrap()).unwrap());
        }
        assert!(worst < last, "eta {eta}: {worst} after {last}");
        last = worst;
    }
    // a window of half-width r averages sin to sin·sin(2πr)/(2πr), an error of order (2πr)²/6
    let r = 0.005;
    assert!(last <= (std::f64::consts::TAU * r).powi(2) / 6.0 * 1.01);
}

#[test]
fn mollified_values_move_no_faster_than_the_continuity_modulus() {
    let (spd, f) = spd_step(vec![0.0, 0.4142]);
    let sys = KroneckerSystem::golden_rotation();
    let eta = 0.05;
    let m = Mollifier::new(&sys, MollifierConfig::new(eta, 64)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let g1: f64 = rng.gen();
        let h: f64 = rng.gen_range(0.0..0.01);
        let g2 = (g1 + h).fract();
        let lhs = spd.distance(&m.apply(&spd, &f, &torus(g1)).unwrap(), &m.apply(&spd, &f, &torus(g2)).unwrap()).unwrap();
        let phi = continuity_modulus(&spd, &sys, &f, &torus(h), 1, 10_000).unwrap();
        // grid cells of U_η are η/64 wide; one cell of slack on each break
        let rhs = phi / m.neighborhood_measure() + 2.0 / 64.0;
        assert!(lhs <= rhs + 1e-9, "h {h}: {lhs} > {rhs}");
    }
}

#[test]
fn stability_of_mollifiers_under_small_l1_perturbations() {
    let (spd, f) = spd_step(vec![0.0, 0.4142]);
    let sys = KroneckerSystem::golden_rotation();
    let g = shifted(&f, &sys, 0.002);
    let r = check_mollifier_stability(&spd, &sys, &f, &g, MollifierConfig::new(0.1, 64), 0.05, 200, 10_000).unwrap();
    assert!((r.l1 - 0.004).abs() < 1e-3);
    assert!((r.rho - 0.005).abs() < 1e-15);
    assert!(r.bound.holds, "{r:?}");
    // the premise fails for a larger shift
    let g = shifted(&f, &sys, 0.01);
    assert!(check_mollifier_stability(&spd, &sys, &f, &g, MollifierConfig::new(0.1, 64), 0.05, 200, 10_000).is_err());
}

#[test]
fn truncation_of_a_far_excursion() {
    let spd = Spd::new(3);
    let sys = KroneckerSystem::golden_rotation();
    let dir = spd.default_direction();
    let far = spd.along(&dir, 10.0).unwrap();
    let z0 = spd.base_point();
    let f = {
        let (z0, far) = (z0.clone(), far.clone());
        OrbitFunction::new(Regularity::L1, move |g| Ok(if g.torus_coord(0)? < 0.05 { far.clone() } else { z0.clone() }))
    };
    let t5 = truncate(&spd, &f, z0.clone(), 5.0).unwrap();
    let d = l1_distance(&spd, &sys, &f, &t5, 10_000).unwrap();
    assert!((d - 0.5).abs() < 1e-9, "{d}");
    let t20 = truncate(&spd, &f, z0.clone(), 20.0).unwrap();
    assert!(l1_distance(&spd, &sys, &f, &t20, 10_000).unwrap() < 1e-12);
    assert!(truncate(&spd, &f, z0, 0.0).is_err());
}

#[test]
fn truncation_error_of_a_heavy_tail_shrinks_with_the_radius() {
    // δ(A(g), z₀) = g^{-1/2}, so ∫ over the truncated set is 2/N
    let e = Euclidean::new(1);
    let sys = KroneckerSystem::golden_rotation();
    let f = OrbitFunction::new(Regularity::L1, |g| Ok(e_point(g.torus_coord(0)?.powf(-0.5))));
    let mut last = f64::INFINITY;
    for n in [2.0, 4.0, 8.0, 16.0] {
        let t = truncate(&e, &f, e_point(0.0), n).unwrap();
        let d = l1_distance(&e, &sys, &f, &t, 10_000).unwrap();
        assert!((d - 2.0 / n).abs() < 0.03, "N = {n}: {d}");
        assert!(d < last);
        last = d;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn coupled_barycenters_contract(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..6).map(|_| rng.gen_range(0.1..1.0)).collect();
        let spd = Spd::new(3);
        let ma = EmpiricalMeasure::new((0..6).map(|_| spd.sample_point(&mut rng)).collect(), w.clone()).unwrap();
        let mb = EmpiricalMeasure::new((0..6).map(|_| spd.sample_point(&mut rng)).collect(), w.clone()).unwrap();
        let r = check_barycenter_contraction(&spd, &ma, &mb, KarcherOptions::default()).unwrap();
        prop_assert!(r.slack >= -1e-6, "{r:?}");
        let h = Hyperboloid::new(3);
        let ma = EmpiricalMeasure::new((0..6).map(|_| h.sample_point(&mut rng)).collect(), w.clone()).unwrap();
        let mb = EmpiricalMeasure::new((0..6).map(|_| h.sample_point(&mut rng)).collect(), w).unwrap();
        let r = check_barycenter_contraction(&h, &ma, &mb, KarcherOptions::default()).unwrap();
        prop_assert!(r.slack >= -1e-6, "{r:?}");
    }
}

#[test]
fn coupled_measures_must_match() {
    let e = Euclidean::new(1);
    let a = EmpiricalMeasure::uniform(vec![e_point(0.0), e_point(1.0)]).unwrap();
    let b = EmpiricalMeasure::uniform(vec![e_point(0.0)]).unwrap();
    assert!(check_barycenter_contraction(&e, &a, &b, KarcherOptions::flat()).is_err());
    let c = EmpiricalMeasure::new(vec![e_point(0.0), e_point(1.0)], vec![0.2, 0.8]).unwrap();
    assert!(check_barycenter_contraction(&e, &a, &c, KarcherOptions::flat()).is_err());
}
