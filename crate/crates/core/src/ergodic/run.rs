use super::function::OrbitFunction;
use super::system::{Group, GroupElement, KroneckerSystem};
use crate::error::{argument, Result};
use crate::geometry::{HadamardSpace, InequalitySlack, TangentSpace};
use crate::means::{karcher_mean, BarycenterResult, EmpiricalMeasure, InductiveState, KarcherOptions};
use crate::mollify::l1_distance;

/// One checkpoint of an ergodic run.
#[derive(Debug, Clone)]
pub struct TraceEntry<P> {
    pub n: usize,
    pub point: P,
    pub delta_to_reference: f64,
    /// Running diameter estimate after `n` terms.
    pub diameter_bound: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTrace<P> {
    pub entries: Vec<TraceEntry<P>>,
    pub reference: P,
    pub diameter_bound: f64,
    pub ergodic: bool,
    pub warnings: Vec<String>,
    /// How often each residue was visited (cyclic systems only).
    pub visit_counts: Option<Vec<u64>>,
}

impl<P> ConvergenceTrace<P> {
    pub fn final_delta(&self) -> f64 {
        self.entries.last().map_or(f64::NAN, |e| e.delta_to_reference)
    }

    pub fn delta_at(&self, n: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.n == n).map(|e| e.delta_to_reference)
    }
}

/// Powers of two and powers of ten up to `n_max`, plus `n_max` itself.
pub fn checkpoints(n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 1usize;
    while p <= n_max {
        out.push(p);
        p = match p.checked_mul(2) {
            Some(v) => v,
            None => break,
        };
    }
    let mut p = 10usize;
    while p <= n_max {
        out.push(p);
        p = match p.checked_mul(10) {
            Some(v) => v,
            None => break,
        };
    }
    out.push(n_max);
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptions {
    pub quadrature_n: usize,
    pub karcher: KarcherOptions,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self { quadrature_n: 10_000, karcher: KarcherOptions::default() }
    }
}

/// Barycenter of the pushforward of Haar measure under `f`, discretized on
/// [`KroneckerSystem::quadrature_grid`] with equal weights.
pub fn estimate_pushforward_barycenter<S: TangentSpace>(
    space: &S,
    system: &KroneckerSystem,
    f: &OrbitFunction<S::Point>,
    quadrature_n: usize,
    karcher: KarcherOptions,
) -> Result<BarycenterResult<S::Point>> {
    let atoms = system
        .quadrature_grid(quadrature_n)?
        .iter()
        .map(|g| f.evaluate(g))
        .collect::<Result<Vec<_>>>()?;
    karcher_mean(space, &EmpiricalMeasure::uniform(atoms)?, karcher)
}

/// Streams the inductive means `S_n(a^τ(start))` for `n ≤ n_max` and records
/// `δ(S_n, reference)` at every checkpoint of [`checkpoints`].
///
/// Memory use does not grow with `n_max`. With `reference = None` the
/// reference is the estimated pushforward barycenter. A non-ergodic system is
/// not an error; it adds a warning to the trace.
pub fn ergodic_inductive_run<S: TangentSpace>(
    space: &S,
    system: &KroneckerSystem,
    f: &OrbitFunction<S::Point>,
    start: &GroupElement,
    n_max: usize,
    reference: Option<&S::Point>,
    reference_opts: ReferenceOptions,
) -> Result<ConvergenceTrace<S::Point>> {
    let mut warnings = Vec::new();
    let reference = match reference {
        Some(r) => {
            space.validate(r)?;
            r.clone()
        }
        None => {
            let r = estimate_pushforward_barycenter(space, system, f, reference_opts.quadrature_n, reference_opts.karcher)?;
            if !r.converged {
                warnings.push(format!("reference barycenter did not converge (last step {:e})", r.final_step));
            }
            r.point
        }
    };
    trace_against(space, system, f, start, n_max, reference, warnings)
}

/// Like [`ergodic_inductive_run`] with an explicit reference; only needs distance and geodesic.
pub fn trace_against<S: HadamardSpace>(
    space: &S,
    system: &KroneckerSystem,
    f: &OrbitFunction<S::Point>,
    start: &GroupElement,
    n_max: usize,
    reference: S::Point,
    mut warnings: Vec<String>,
) -> Result<ConvergenceTrace<S::Point>> {
    if n_max == 0 {
        return Err(argument("n_max must be at least 1"));
    }
    if !system.is_ergodic() {
        warnings.push("shift is not ergodic; the limit need not be the barycenter".to_string());
    }
    let mut visits = match system.group() {
        Group::Cyclic { order } => Some(vec![0u64; order as usize]),
        Group::Torus { .. } => None,
    };
    let marks = checkpoints(n_max);
    let mut next_mark = marks.iter().copied().peekable();
    let mut entries = Vec::with_capacity(marks.len());

    let mut orbit = system.orbit_iter(start)?;
    let mut state: Option<InductiveState<S::Point>> = None;
    for n in 1..=n_max {
        let g = orbit.next().expect("orbits are infinite");
        if let (Some(v), GroupElement::Cyclic(k)) = (visits.as_mut(), &g) {
            v[*k as usize] += 1;
        }
        let a = f.evaluate(&g)?;
        match state.as_mut() {
            None => state = Some(InductiveState::start(space, a)?),
            Some(s) => s.push(space, &a)?,
        }
        if next_mark.peek() == Some(&n) {
            next_mark.next();
            let s = state.as_ref().expect("state initialized at n = 1");
            entries.push(TraceEntry {
                n,
                point: s.current.clone(),
                delta_to_reference: space.distance(&s.current, &reference)?,
                diameter_bound: s.diameter_bound,
            });
        }
    }
    let diameter_bound = state.map_or(0.0, |s| s.diameter_bound);
    Ok(ConvergenceTrace { entries, reference, diameter_bound, ergodic: system.is_ergodic(), warnings, visit_counts: visits })
}

/// Arithmetic mean of `f` along the first `n` orbit points.
pub fn birkhoff_average(
    system: &KroneckerSystem,
    f: impl Fn(&GroupElement) -> f64,
    start: &GroupElement,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(argument("n must be at least 1"));
    }
    let sum: f64 = system.orbit_iter(start)?.take(n).map(|g| f(&g)).sum();
    Ok(sum / n as f64)
}

/// `δ(S_n(a^τ(g)), S_n(b^τ(g))) ≤ ε + ∫ δ(A, B) dm`, with the integral by quadrature.
#[allow(clippy::too_many_arguments)]
pub fn check_orbit_contraction<S: HadamardSpace>(
    space: &S,
    system: &KroneckerSystem,
    a: &OrbitFunction<S::Point>,
    b: &OrbitFunction<S::Point>,
    start: &GroupElement,
    n: usize,
    epsilon: f64,
    quadrature_n: usize,
) -> Result<InequalitySlack> {
    if n == 0 {
        return Err(argument("n must be at least 1"));
    }
    let mut sa: Option<InductiveState<S::Point>> = None;
    let mut sb: Option<InductiveState<S::Point>> = None;
    for g in system.orbit_iter(start)?.take(n) {
        let (pa, pb) = (a.evaluate(&g)?, b.evaluate(&g)?);
        match (sa.as_mut(), sb.as_mut()) {
            (Some(x), Some(y)) => {
                x.push(space, &pa)?;
                y.push(space, &pb)?;
            }
            _ => {
                sa = Some(InductiveState::start(space, pa)?);
                sb = Some(InductiveState::start(space, pb)?);
            }
        }
    }
    let (sa, sb) = (sa.expect("n >= 1"), sb.expect("n >= 1"));
    let lhs = space.distance(&sa.current, &sb.current)?;
    let rhs = epsilon + l1_distance(space, system, a, b, quadrature_n)?;
    Ok(InequalitySlack::new(lhs, rhs))
}
