//! One runner per subcommand. Each returns the CSV body, a JSON summary and
//! the outcome of every configured assertion.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::config::{
    looks_rational, Assertions, Command, Diagnostic, ExperimentConfig, FunctionSpec, GroupKind, SpaceSpec, Suite,
    DEFAULT_CONDITION, DEFAULT_GRID, DEFAULT_QUADRATURE, DEFAULT_SAMPLES, DEFAULT_SAMPLES_PER_EVAL,
};
use crate::ergodic::{
    estimate_pushforward_barycenter, trace_against, ConvergenceTrace, GroupElement, KroneckerSystem, OrbitFunction,
};
use crate::error::Error;
use crate::functions;
use crate::geometry::Tolerance;
use crate::means::{inductive_mean, karcher_mean, sequence_diameter, EmpiricalMeasure, KarcherOptions};
use crate::mollify::{check_mollifier_stability, l1_distance, mollified_function, Mollifier, MollifierConfig};
use crate::spaces::{BentEuclidean, Euclidean, Hyperboloid, ModelSpace, SampleSpace, Spd};
use crate::suite::{axiom_suite, lemma_suite, CheckerTally, LemmaShape};

/// Outcome of one assertion.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub csv: String,
    pub results: Value,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub ergodic: Option<bool>,
}

/// Why a run stopped.
#[derive(Debug, Clone)]
pub enum Failure {
    Usage(Vec<Diagnostic>),
    Numeric { operation: String, message: String },
}

fn usage(field: &str, message: impl Into<String>) -> Failure {
    Failure::Usage(vec![Diagnostic::new(field, message)])
}

fn numeric(operation: impl Into<String>) -> impl FnOnce(Error) -> Failure {
    let operation = operation.into();
    move |e| Failure::Numeric { operation, message: e.to_string() }
}

type Run<T> = std::result::Result<T, Failure>;

/// Settings shared by all runners.
struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    flat: bool,
}

impl Ctx<'_> {
    fn karcher(&self) -> KarcherOptions {
        let base = if self.flat { KarcherOptions::flat() } else { KarcherOptions::default() };
        KarcherOptions::new(self.cfg.tol.unwrap_or(base.tol), self.cfg.max_iter.unwrap_or(base.max_iter))
    }

    fn assertions(&self) -> Assertions {
        self.cfg.assertions()
    }
}

fn spd_space(n: usize, cfg: &ExperimentConfig) -> Run<Spd> {
    Spd::new(n)
        .with_sample_condition(cfg.condition.unwrap_or(DEFAULT_CONDITION))
        .map_err(|e| usage("condition", e.to_string()))
}

macro_rules! with_model_space {
    ($cfg:expr, $spec:expr, $runner:ident) => {
        match $spec {
            SpaceSpec::Euclid(d) => $runner(&Euclidean::new(d), &Ctx { cfg: $cfg, flat: true }),
            SpaceSpec::Spd(n) => $runner(&spd_space(n, $cfg)?, &Ctx { cfg: $cfg, flat: false }),
            SpaceSpec::Hyperboloid(d) => $runner(&Hyperboloid::new(d), &Ctx { cfg: $cfg, flat: false }),
            SpaceSpec::Broken(_) => Err(usage("space", "broken:d only supports space-check --suite axioms")),
        }
    };
}

/// Runs a validated configuration.
pub fn run(cfg: &ExperimentConfig) -> Run<Report> {
    let spec = cfg.space_spec().ok_or_else(|| usage("space", "missing or invalid"))?;
    match cfg.command.ok_or_else(|| usage("command", "missing"))? {
        Command::SpaceCheck => match spec {
            SpaceSpec::Broken(d) => axioms_only(&BentEuclidean::new(d), cfg),
            _ => with_model_space!(cfg, spec, space_check),
        },
        Command::Mean => match spec {
            SpaceSpec::Euclid(d) => mean(&Euclidean::new(d), &Ctx { cfg, flat: true }, Some(arithmetic_deviation)),
            SpaceSpec::Spd(n) => mean(&spd_space(n, cfg)?, &Ctx { cfg, flat: false }, None),
            SpaceSpec::Hyperboloid(d) => mean(&Hyperboloid::new(d), &Ctx { cfg, flat: false }, None),
            SpaceSpec::Broken(_) => Err(usage("space", "broken:d only supports space-check --suite axioms")),
        },
        Command::Karcher => with_model_space!(cfg, spec, karcher),
        Command::Ergodic => with_model_space!(cfg, spec, ergodic),
        Command::Holbrook => with_model_space!(cfg, spec, holbrook),
        Command::Mollify => with_model_space!(cfg, spec, mollify),
    }
}

/// Space-aware checks that [`ExperimentConfig::validate`] cannot do alone:
/// JSON points and directions are parsed in the encoding of the chosen space.
pub fn validate_values(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    fn inner<S>(space: &S, ctx: &Ctx) -> Run<()>
    where
        S: ModelSpace + Clone + Send + Sync + 'static,
        S::Point: Send + Sync + 'static,
        S::Tangent: Send + Sync + 'static,
    {
        let cfg = ctx.cfg;
        if let Some(v) = cfg.reference.as_ref().and_then(|r| r.point()) {
            space.point_from_json(v).map_err(|e| usage("reference", e.to_string()))?;
        }
        if let (Some(f), Some(_)) = (&cfg.function, &cfg.system) {
            let (system, _) = build_system(cfg)?;
            build_function(space, f, &system, cfg.seeds()[0])?;
        }
        Ok(())
    }
    let Some(spec) = cfg.space_spec() else { return Vec::new() };
    let r = (|| match spec {
        SpaceSpec::Broken(_) => Ok(()),
        _ => with_model_space!(cfg, spec, inner),
    })();
    match r {
        Err(Failure::Usage(d)) => d,
        _ => Vec::new(),
    }
}

// ---------------------------------------------------------------- space-check

fn tally_csv(rows: &[(u64, CheckerTally)]) -> String {
    let mut csv = String::from("seed,checker,samples,violations,min_slack,min_relative_slack\n");
    for (seed, t) in rows {
        writeln!(csv, "{seed},{},{},{},{:e},{:e}", t.checker, t.samples, t.violations, t.min_slack, t.min_relative_slack)
            .unwrap();
    }
    csv
}

fn tally_report(rows: Vec<(u64, CheckerTally)>, assertions: &Assertions) -> Report {
    let mut checks = Vec::new();
    let total: usize = rows.iter().map(|(_, t)| t.violations).sum();
    if let Some(min) = assertions.min_violations {
        checks.push(Check::new("min_violations", total >= min, format!("{total} violations in total, need at least {min}")));
    } else {
        let allowed = assertions.max_violations.unwrap_or(0);
        for (seed, t) in &rows {
            checks.push(Check::new(
                &format!("{}[seed {seed}]", t.checker),
                t.violations <= allowed,
                format!("{} of {} samples violate (allowed {allowed}); min slack {:e}", t.violations, t.samples, t.min_slack),
            ));
        }
    }
    let results = json!({ "tallies": rows.iter().map(|(s, t)| json!({"seed": s, "tally": t})).collect::<Vec<_>>() });
    Report { csv: tally_csv(&rows), results, checks, warnings: Vec::new(), ergodic: None }
}

fn axioms_only<S: SampleSpace>(space: &S, cfg: &ExperimentConfig) -> Run<Report> {
    if cfg.suite == Some(Suite::Lemmas) {
        return Err(usage("suite", "lemma checks need barycenters, which this space lacks"));
    }
    let tol = cfg.tol.unwrap_or(1e-8);
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut rows = Vec::new();
    for seed in cfg.seeds() {
        let tallies = axiom_suite(space, samples, seed, Tolerance::uniform(tol)).map_err(numeric(format!("axiom suite (seed {seed})")))?;
        rows.extend(tallies.into_iter().map(|t| (seed, t)));
    }
    Ok(tally_report(rows, &cfg.assertions()))
}

fn space_check<S: ModelSpace>(space: &S, ctx: &Ctx) -> Run<Report> {
    let cfg = ctx.cfg;
    if cfg.suite != Some(Suite::Lemmas) {
        return axioms_only(space, cfg);
    }
    let tol = cfg.tol.unwrap_or(1e-6);
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let karcher = if ctx.flat { KarcherOptions::flat() } else { KarcherOptions::default() };
    let mut rows = Vec::new();
    for seed in cfg.seeds() {
        let tallies = lemma_suite(space, samples, seed, Tolerance::new(tol, 0.0), LemmaShape::default(), karcher)
            .map_err(numeric(format!("lemma suite (seed {seed})")))?;
        rows.extend(tallies.into_iter().map(|t| (seed, t)));
    }
    Ok(tally_report(rows, &cfg.assertions()))
}

// ---------------------------------------------------------------- mean

fn arithmetic_deviation(seq: &[nalgebra::DVector<f64>], mean: &nalgebra::DVector<f64>) -> f64 {
    let mut sum = nalgebra::DVector::zeros(mean.len());
    for x in seq {
        sum += x;
    }
    (sum / seq.len() as f64 - mean).amax()
}

type Deviation<P> = fn(&[P], &P) -> f64;

fn mean<S: ModelSpace>(space: &S, ctx: &Ctx, deviation: Option<Deviation<S::Point>>) -> Run<Report> {
    let cfg = ctx.cfg;
    let length = cfg.length.unwrap_or(1);
    let count = cfg.sequences.unwrap_or(1);
    let mut csv = String::from("seed,sequence,length,arithmetic_deviation,order_gap\n");
    let (mut worst_dev, mut least_gap) = (0.0f64, f64::INFINITY);
    for seed in cfg.seeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..count {
            let seq: Vec<S::Point> = (0..length).map(|_| space.sample_point(&mut rng)).collect();
            let m = inductive_mean(space, &seq).map_err(numeric(format!("inductive_mean (seed {seed}, sequence {i})")))?;
            let rev: Vec<S::Point> = seq.iter().rev().cloned().collect();
            let mr = inductive_mean(space, &rev).map_err(numeric(format!("inductive_mean (seed {seed}, reversed {i})")))?;
            let gap = space.distance(&m, &mr).map_err(numeric("distance"))?;
            least_gap = least_gap.min(gap);
            let dev = deviation.map(|f| f(&seq, &m));
            if let Some(d) = dev {
                worst_dev = worst_dev.max(d);
            }
            let dev_s = dev.map_or(String::new(), |d| format!("{d:e}"));
            writeln!(csv, "{seed},{i},{length},{dev_s},{gap:e}").unwrap();
        }
    }
    let a = ctx.assertions();
    let mut checks = Vec::new();
    if let Some(t) = a.max_deviation {
        if deviation.is_none() {
            return Err(usage("assert.max_deviation", "the arithmetic-mean comparison needs a Euclidean space"));
        }
        checks.push(Check::new("max_deviation", worst_dev <= t, format!("largest deviation {worst_dev:e} (limit {t:e})")));
    }
    if let Some(t) = a.min_order_gap {
        checks.push(Check::new("min_order_gap", least_gap > t, format!("smallest forward/reversed gap {least_gap:e} (must exceed {t:e})")));
    }
    let results = json!({
        "max_arithmetic_deviation": deviation.map(|_| worst_dev),
        "min_order_gap": least_gap,
    });
    Ok(Report { csv, results, checks, warnings: Vec::new(), ergodic: None })
}

// ---------------------------------------------------------------- karcher

fn karcher<S: ModelSpace>(space: &S, ctx: &Ctx) -> Run<Report> {
    let cfg = ctx.cfg;
    let n = cfg.atoms.unwrap_or(1);
    let opts = ctx.karcher();
    let mut csv = String::from("seed,atoms,iterations,converged,final_step,objective,permutation_gap\n");
    let mut runs = Vec::new();
    let mut checks = Vec::new();
    let limit = ctx.assertions().max_permutation_gap.unwrap_or(2.0 * opts.tol);
    for seed in cfg.seeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms: Vec<S::Point> = (0..n).map(|_| space.sample_point(&mut rng)).collect();
        let op = format!("karcher_mean (seed {seed}, {n} atoms)");
        let r = karcher_mean(space, &EmpiricalMeasure::uniform(atoms.clone()).map_err(numeric(op.clone()))?, opts)
            .map_err(numeric(op.clone()))?;
        let rev: Vec<S::Point> = atoms.into_iter().rev().collect();
        let rr = karcher_mean(space, &EmpiricalMeasure::uniform(rev).map_err(numeric(op.clone()))?, opts).map_err(numeric(op))?;
        let gap = space.distance(&r.point, &rr.point).map_err(numeric("distance"))?;
        writeln!(csv, "{seed},{n},{},{},{:e},{:e},{gap:e}", r.iterations, r.converged, r.final_step, r.objective).unwrap();
        checks.push(Check::new(
            &format!("converged[seed {seed}]"),
            r.converged && rr.converged,
            format!("{} iterations, final step {:e} (tol {:e})", r.iterations, r.final_step, opts.tol),
        ));
        checks.push(Check::new(&format!("permutation_gap[seed {seed}]"), gap <= limit, format!("{gap:e} (limit {limit:e})")));
        runs.push(json!({
            "seed": seed,
            "point": space.point_to_json(&r.point),
            "objective": r.objective,
            "iterations": r.iterations,
            "converged": r.converged,
            "final_step": r.final_step,
            "permutation_gap": gap,
        }));
    }
    Ok(Report { csv, results: json!({ "runs": runs }), checks, warnings: Vec::new(), ergodic: None })
}

// ---------------------------------------------------------------- systems and functions

fn build_system(cfg: &ExperimentConfig) -> Run<(KroneckerSystem, Vec<String>)> {
    let sys = cfg.system.as_ref().ok_or_else(|| usage("system", "missing"))?;
    let mut warnings = Vec::new();
    let system = match sys.kind {
        GroupKind::Torus => {
            let alpha = sys
                .alpha
                .as_ref()
                .ok_or_else(|| usage("alpha", "torus systems need a rotation"))?
                .resolve(sys.d as usize)
                .map_err(|e| usage("alpha", e))?;
            let rational = looks_rational(&alpha);
            let ergodic = sys.ergodic.unwrap_or(!rational);
            if rational && sys.ergodic.is_none() {
                warnings.push(format!("alpha = {alpha:?} is numerically rational; shift marked non-ergodic"));
            }
            KroneckerSystem::torus(alpha, ergodic).map_err(|e| usage("alpha", e.to_string()))?
        }
        GroupKind::Cyclic => {
            if sys.ergodic.is_some() {
                warnings.push("ergodicity of cyclic shifts is decided by the generator; override ignored".into());
            }
            KroneckerSystem::cyclic(sys.d, sys.generator.unwrap_or(1)).map_err(|e| usage("system", e.to_string()))?
        }
    };
    Ok((system, warnings))
}

fn direction<S: ModelSpace>(space: &S, v: &Option<Value>, field: &str) -> Run<S::Tangent> {
    match v {
        None => Ok(space.default_direction()),
        Some(v) => space.tangent_from_json(v).map_err(|e| usage(field, e.to_string())),
    }
}

fn build_function<S>(space: &S, spec: &FunctionSpec, system: &KroneckerSystem, seed: u64) -> Run<OrbitFunction<S::Point>>
where
    S: ModelSpace + Clone + Send + Sync + 'static,
    S::Point: Send + Sync + 'static,
    S::Tangent: Send + Sync + 'static,
{
    let bad = |field: &str| {
        let field = field.to_string();
        move |e: Error| usage(&field, e.to_string())
    };
    Ok(match spec {
        FunctionSpec::Constant { point } => {
            let p = match point {
                None => space.base_point(),
                Some(v) => space.point_from_json(v).map_err(bad("function.point"))?,
            };
            functions::constant(p)
        }
        FunctionSpec::Sin { amplitude, direction: d } => {
            functions::sine(space, direction(space, d, "function.direction")?, *amplitude)
        }
        FunctionSpec::Identity { direction: d } => functions::identity(space, direction(space, d, "function.direction")?),
        FunctionSpec::Step { breaks, jump, directions } => {
            let dirs = match directions {
                None => vec![space.default_direction(); breaks.len().saturating_sub(1)],
                Some(ds) => ds
                    .iter()
                    .map(|d| direction(space, &Some(d.clone()), "function.directions"))
                    .collect::<Run<Vec<_>>>()?,
            };
            functions::step_from_directions(space, breaks.clone(), &dirs, *jump).map_err(bad("function"))?
        }
        FunctionSpec::Coset { modulus, amplitude, direction: d } => {
            functions::coset_sign(space, direction(space, d, "function.direction")?, *modulus, *amplitude)
        }
        FunctionSpec::Atoms { points } => {
            let order = match system.group() {
                crate::ergodic::Group::Cyclic { order } => order as usize,
                crate::ergodic::Group::Torus { .. } => return Err(usage("function", "atoms need a cyclic system")),
            };
            let atoms = match points {
                Some(ps) => ps.iter().map(|v| space.point_from_json(v)).collect::<Result<Vec<_>, _>>().map_err(bad("function.points"))?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..order).map(|_| space.sample_point(&mut rng)).collect()
                }
            };
            functions::cyclic_atoms(atoms)
        }
    })
}

// ---------------------------------------------------------------- traces

/// Summary of one convergence run.
struct RunSummary {
    label: Value,
    final_delta: f64,
    delta_100: Option<f64>,
    atoms_diameter: Option<f64>,
    trace: Vec<(usize, f64, f64)>,
}

impl RunSummary {
    fn from_trace<P>(label: Value, t: &ConvergenceTrace<P>, atoms_diameter: Option<f64>) -> Self {
        Self {
            label,
            final_delta: t.final_delta(),
            delta_100: t.delta_at(100),
            atoms_diameter,
            trace: t.entries.iter().map(|e| (e.n, e.delta_to_reference, e.diameter_bound)).collect(),
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "run": self.label,
            "final_delta": self.final_delta,
            "delta_at_100": self.delta_100,
            "atoms_diameter": self.atoms_diameter,
            "diameter_bound": self.trace.last().map(|e| e.2),
            "trace": self.trace.iter().map(|(n, d, _)| json!([n, d])).collect::<Vec<_>>(),
        })
    }
}

/// `(n, delta_to_reference, diameter_bound)`; with several runs each column is the maximum over runs.
fn trace_csv(runs: &[RunSummary]) -> String {
    let mut csv = String::from("n,delta_to_reference,diameter_bound\n");
    let Some(first) = runs.first() else { return csv };
    for (i, (n, _, _)) in first.trace.iter().enumerate() {
        let delta = runs.iter().map(|r| r.trace[i].1).fold(0.0, f64::max);
        let diam = runs.iter().map(|r| r.trace[i].2).fold(0.0, f64::max);
        writeln!(csv, "{n},{delta:e},{diam:e}").unwrap();
    }
    csv
}

fn trend_checks(runs: &[RunSummary], a: &Assertions) -> Vec<Check> {
    let total = runs.len();
    let need = a.min_passing.unwrap_or(total);
    let mut checks = Vec::new();
    if let Some(t) = a.max_final_delta {
        let ok = runs.iter().filter(|r| r.final_delta <= t).count();
        let worst = runs.iter().map(|r| r.final_delta).fold(0.0, f64::max);
        checks.push(Check::new("max_final_delta", ok >= need, format!("{ok}/{total} runs end at delta <= {t} (need {need}); worst {worst:e}")));
    }
    if let Some(t) = a.min_final_delta {
        let ok = runs.iter().filter(|r| r.final_delta >= t).count();
        let least = runs.iter().map(|r| r.final_delta).fold(f64::INFINITY, f64::min);
        checks.push(Check::new("min_final_delta", ok >= need, format!("{ok}/{total} runs end at delta >= {t} (need {need}); least {least:e}")));
    }
    if let Some(r) = a.max_diameter_ratio {
        let bad: Vec<String> = runs
            .iter()
            .filter(|x| !x.atoms_diameter.is_some_and(|d| x.final_delta <= r * d))
            .map(|x| x.label.to_string())
            .collect();
        checks.push(Check::new("max_diameter_ratio", bad.is_empty(), format!("final delta <= {r} x atom diameter; failing runs: {bad:?}")));
    }
    if let Some(r) = a.max_ratio_100 {
        let bad: Vec<String> = runs
            .iter()
            .filter(|x| !x.delta_100.is_some_and(|d| x.final_delta <= r * d))
            .map(|x| x.label.to_string())
            .collect();
        checks.push(Check::new("max_ratio_100", bad.is_empty(), format!("final delta <= {r} x delta at n = 100; failing runs: {bad:?}")));
    }
    if a.require_decrease == Some(true) {
        let bad: Vec<String> = runs
            .iter()
            .filter(|x| !x.delta_100.is_some_and(|d| x.final_delta < d))
            .map(|x| x.label.to_string())
            .collect();
        checks.push(Check::new("require_decrease", bad.is_empty(), format!("final delta below delta at n = 100; failing runs: {bad:?}")));
    }
    checks
}

// ---------------------------------------------------------------- ergodic

fn ergodic<S>(space: &S, ctx: &Ctx) -> Run<Report>
where
    S: ModelSpace + Clone + Send + Sync + 'static,
    S::Point: Send + Sync + 'static,
    S::Tangent: Send + Sync + 'static,
{
    let cfg = ctx.cfg;
    let (system, mut warnings) = build_system(cfg)?;
    let seeds = cfg.seeds();
    let spec = cfg.function.as_ref().ok_or_else(|| usage("function", "missing"))?;
    let f = build_function(space, spec, &system, seeds[0])?;
    let n_max = cfg.n_max.ok_or_else(|| usage("n_max", "missing"))?;
    let quadrature_n = cfg.quadrature_n.unwrap_or(DEFAULT_QUADRATURE);

    let reference = match cfg.reference.as_ref().and_then(|r| r.point()) {
        Some(v) => space.point_from_json(v).map_err(|e| usage("reference", e.to_string()))?,
        None => {
            let r = estimate_pushforward_barycenter(space, &system, &f, quadrature_n, ctx.karcher())
                .map_err(numeric(format!("estimate_pushforward_barycenter (quadrature_n {quadrature_n})")))?;
            if !r.converged {
                warnings.push(format!("reference barycenter did not converge (last step {:e})", r.final_step));
            }
            r.point
        }
    };

    let starts = cfg.starts.unwrap_or(1);
    let mut runs = Vec::new();
    for &seed in &seeds {
        for (i, g) in system.haar_samples(seed, starts).into_iter().enumerate() {
            let t = trace_against(space, &system, &f, &g, n_max, reference.clone(), Vec::new())
                .map_err(numeric(format!("ergodic_inductive_run (seed {seed}, start {g:?})")))?;
            for w in &t.warnings {
                if !warnings.contains(w) {
                    warnings.push(w.clone());
                }
            }
            runs.push(RunSummary::from_trace(json!({"seed": seed, "index": i, "start": element_json(&g)}), &t, None));
        }
    }
    let checks = trend_checks(&runs, &ctx.assertions());
    let results = json!({
        "reference": space.point_to_json(&reference),
        "runs": runs.iter().map(RunSummary::to_json).collect::<Vec<_>>(),
    });
    Ok(Report { csv: trace_csv(&runs), results, checks, warnings, ergodic: Some(system.is_ergodic()) })
}

fn element_json(g: &GroupElement) -> Value {
    match g {
        GroupElement::Torus(x) => json!(x),
        GroupElement::Cyclic(k) => json!(k),
    }
}

// ---------------------------------------------------------------- holbrook

fn holbrook<S>(space: &S, ctx: &Ctx) -> Run<Report>
where
    S: ModelSpace + Clone + Send + Sync + 'static,
    S::Point: Send + Sync + 'static,
    S::Tangent: Send + Sync + 'static,
{
    let cfg = ctx.cfg;
    let d = cfg.atoms.ok_or_else(|| usage("atoms", "missing"))?;
    let n_max = cfg.n_max.ok_or_else(|| usage("n_max", "missing"))?;
    let system = KroneckerSystem::cyclic(d as u64, 1).map_err(|e| usage("atoms", e.to_string()))?;
    let mut runs = Vec::new();
    let mut warnings = Vec::new();
    for seed in cfg.seeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms: Vec<S::Point> = (0..d).map(|_| space.sample_point(&mut rng)).collect();
        let diameter = sequence_diameter(&atoms, space).map_err(numeric("sequence_diameter"))?;
        let op = format!("karcher_mean of the atoms (seed {seed})");
        let bary = karcher_mean(space, &EmpiricalMeasure::uniform(atoms.clone()).map_err(numeric(op.clone()))?, ctx.karcher())
            .map_err(numeric(op.clone()))?;
        if !bary.converged {
            return Err(Failure::Numeric { operation: op, message: format!("did not converge (last step {:e})", bary.final_step) });
        }
        let f = functions::cyclic_atoms(atoms);
        let t = trace_against(space, &system, &f, &system.identity(), n_max, bary.point, Vec::new())
            .map_err(numeric(format!("inductive run (seed {seed})")))?;
        warnings.extend(t.warnings.iter().cloned());
        runs.push(RunSummary::from_trace(json!({"seed": seed}), &t, Some(diameter)));
    }
    let checks = trend_checks(&runs, &ctx.assertions());
    let results = json!({ "runs": runs.iter().map(RunSummary::to_json).collect::<Vec<_>>() });
    Ok(Report { csv: trace_csv(&runs), results, checks, warnings, ergodic: Some(true) })
}

// ---------------------------------------------------------------- mollify

fn mollify<S>(space: &S, ctx: &Ctx) -> Run<Report>
where
    S: ModelSpace + Clone + Send + Sync + 'static,
    S::Point: Send + Sync + 'static,
    S::Tangent: Send + Sync + 'static,
{
    let cfg = ctx.cfg;
    let (system, mut warnings) = build_system(cfg)?;
    let spec = cfg.function.as_ref().ok_or_else(|| usage("function", "missing"))?;
    let f = build_function(space, spec, &system, cfg.seeds()[0])?;
    let etas = cfg.eta_schedule.clone().ok_or_else(|| usage("eta", "missing eta schedule"))?;
    let quadrature_n = cfg.quadrature_n.unwrap_or(DEFAULT_QUADRATURE);
    let grid_n = cfg.grid_n.unwrap_or(DEFAULT_GRID);
    let samples = cfg.samples_per_eval.unwrap_or(DEFAULT_SAMPLES_PER_EVAL);
    let sampler_seed = cfg.seeds.as_ref().and_then(|s| s.first().copied()).unwrap_or(0);
    let config = |eta: f64| MollifierConfig { eta, samples_per_eval: samples, sampler_seed, karcher: ctx.karcher() };

    let mut csv = String::from("eta,l1_estimate,max_grid_deviation\n");
    let mut l1s = Vec::new();
    let grid = system.quadrature_grid(grid_n).map_err(numeric("quadrature_grid"))?;
    for &eta in &etas {
        let op = format!("mollify (eta {eta})");
        let m = Mollifier::new(&system, config(eta)).map_err(|e| usage("eta", e.to_string()))?;
        for w in m.warnings() {
            warnings.push(w.clone());
        }
        let fe = mollified_function(space, &system, &f, config(eta)).map_err(numeric(op.clone()))?;
        let l1 = l1_distance(space, &system, &f, &fe, quadrature_n).map_err(numeric(op.clone()))?;
        let mut worst: f64 = 0.0;
        for g in &grid {
            let a = f.evaluate(g).map_err(numeric(op.clone()))?;
            let b = fe.evaluate(g).map_err(numeric(format!("{op} at {g:?}")))?;
            worst = worst.max(space.distance(&a, &b).map_err(numeric("distance"))?);
        }
        writeln!(csv, "{eta},{l1:e},{worst:e}").unwrap();
        l1s.push((eta, l1, worst));
    }

    let a = ctx.assertions();
    let mut checks = Vec::new();
    if a.strictly_decreasing == Some(true) {
        let ok = l1s.windows(2).all(|w| w[1].1 < w[0].1);
        let vals: Vec<String> = l1s.iter().map(|x| format!("{:e}", x.1)).collect();
        checks.push(Check::new("strictly_decreasing", ok, format!("L1 estimates along the schedule: {}", vals.join(", "))));
    }
    if let Some(t) = a.max_final_l1 {
        let last = l1s.last().map_or(f64::NAN, |x| x.1);
        checks.push(Check::new("max_final_l1", last <= t, format!("final L1 estimate {last:e} (limit {t:e})")));
    }
    let mut stability = Value::Null;
    if let Some(st) = &cfg.stability {
        let shifted = match system.group() {
            crate::ergodic::Group::Torus { dim } => GroupElement::Torus(vec![st.shift.rem_euclid(1.0); dim]),
            crate::ergodic::Group::Cyclic { order } => GroupElement::Cyclic((st.shift.round() as i64).rem_euclid(order as i64) as u64),
        };
        let (sys2, f2) = (system.clone(), f.clone());
        let g = OrbitFunction::new(f.regularity(), move |x| f2.evaluate(&sys2.add(x, &shifted)?));
        match check_mollifier_stability(space, &system, &f, &g, config(st.eta), st.epsilon, grid_n, quadrature_n) {
            Ok(rep) => {
                checks.push(Check::new(
                    "stability",
                    rep.bound.holds,
                    format!("max grid distance {:e} <= epsilon {} (L1 {:e}, budget {:e})", rep.bound.lhs, st.epsilon, rep.l1, rep.rho),
                ));
                stability = json!({"l1": rep.l1, "rho": rep.rho, "max_distance": rep.bound.lhs, "epsilon": st.epsilon, "holds": rep.bound.holds});
            }
            Err(Error::Argument(msg)) => checks.push(Check::new("stability", false, msg)),
            Err(e) => return Err(numeric("check_mollifier_stability")(e)),
        }
    }
    let results = json!({
        "schedule": l1s.iter().map(|(e, l, w)| json!({"eta": e, "l1_estimate": l, "max_grid_deviation": w})).collect::<Vec<_>>(),
        "stability": stability,
    });
    Ok(Report { csv, results, checks, warnings, ergodic: Some(system.is_ergodic()) })
}
