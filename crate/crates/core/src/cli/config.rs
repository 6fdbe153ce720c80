//! Experiment configuration: JSON file plus flag overrides, and validation.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ergodic::golden_alpha;
use crate::spaces::MAX_SAMPLE_CONDITION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SpaceCheck,
    Mean,
    Karcher,
    Ergodic,
    Holbrook,
    Mollify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::SpaceCheck => "space-check",
            Command::Mean => "mean",
            Command::Karcher => "karcher",
            Command::Ergodic => "ergodic",
            Command::Holbrook => "holbrook",
            Command::Mollify => "mollify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Axioms,
    Lemmas,
}

/// `euclid:d`, `spd:n`, `hyperboloid:d` or `broken:d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceSpec {
    Euclid(usize),
    Spd(usize),
    Hyperboloid(usize),
    Broken(usize),
}

impl SpaceSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        let (kind, dim) = s.split_once(':').ok_or_else(|| format!("expected KIND:DIM, got {s:?}"))?;
        let dim: usize = dim.trim().parse().map_err(|_| format!("dimension in {s:?} is not a positive integer"))?;
        if dim == 0 {
            return Err(format!("dimension in {s:?} must be at least 1"));
        }
        match kind.trim() {
            "euclid" | "euclidean" => Ok(SpaceSpec::Euclid(dim)),
            "spd" => Ok(SpaceSpec::Spd(dim)),
            "hyperboloid" | "hyperbolic" => Ok(SpaceSpec::Hyperboloid(dim)),
            "broken" => Ok(SpaceSpec::Broken(dim)),
            other => Err(format!("unknown space kind {other:?} (euclid, spd, hyperboloid, broken)")),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Euclid(d) => write!(f, "euclid:{d}"),
            SpaceSpec::Spd(n) => write!(f, "spd:{n}"),
            SpaceSpec::Hyperboloid(d) => write!(f, "hyperboloid:{d}"),
            SpaceSpec::Broken(d) => write!(f, "broken:{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Torus,
    Cyclic,
}

/// A rotation vector: `"golden"`, a decimal string (comma-separated for
/// several coordinates), a number or an array of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Number(f64),
    Vector(Vec<f64>),
    Text(String),
}

impl AlphaSpec {
    pub fn resolve(&self, dim: usize) -> Result<Vec<f64>, String> {
        let v = match self {
            AlphaSpec::Number(x) => vec![*x],
            AlphaSpec::Vector(v) => v.clone(),
            AlphaSpec::Text(s) if s.trim() == "golden" => vec![golden_alpha()],
            AlphaSpec::Text(s) => s
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|_| format!("cannot parse {p:?} as a number")))
                .collect::<Result<_, _>>()?,
        };
        if v.len() != dim {
            return Err(format!("torus:{dim} needs {dim} rotation coordinate(s), got {}", v.len()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err("rotation coordinates must be finite".into());
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(rename = "type")]
    pub kind: GroupKind,
    pub d: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<u64>,
    /// Overrides the ergodicity flag otherwise inferred from the rotation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ergodic: Option<bool>,
}

impl SystemConfig {
    /// `torus:d` or `cyclic:d`, keeping any previously set parameters.
    pub fn parse_into(spec: &str, previous: Option<SystemConfig>) -> Result<Self, String> {
        let (kind, d) = spec.split_once(':').ok_or_else(|| format!("expected torus:D or cyclic:D, got {spec:?}"))?;
        let kind = match kind.trim() {
            "torus" => GroupKind::Torus,
            "cyclic" => GroupKind::Cyclic,
            other => return Err(format!("unknown group {other:?} (torus, cyclic)")),
        };
        let d: u64 = d.trim().parse().map_err(|_| format!("size in {spec:?} is not a positive integer"))?;
        let mut out = previous.unwrap_or(SystemConfig { kind, d, alpha: None, generator: None, ergodic: None });
        out.kind = kind;
        out.d = d;
        Ok(out)
    }
}

/// Named test function. Directions and points are JSON in the encoding of
/// the chosen space; omitted directions default to the space's fixed unit direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<Value>,
    },
    Sin {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Value>,
    },
    Identity {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Value>,
    },
    Step {
        #[serde(default = "half_breaks")]
        breaks: Vec<f64>,
        #[serde(default = "one")]
        jump: f64,
        /// One direction per piece after the first.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        directions: Option<Vec<Value>>,
    },
    Coset {
        modulus: u32,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Value>,
    },
    /// One point per residue of a cyclic group; sampled from the seed when omitted.
    Atoms {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Value>>,
    },
}

/// Accepts `"sin"` as shorthand for `{"name": "sin"}`.
fn function_or_name<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<FunctionSpec>, D::Error> {
    let value = Value::deserialize(d)?;
    let value = match value {
        Value::String(name) => serde_json::json!({ "name": name }),
        other => other,
    };
    serde_json::from_value(value).map(Some).map_err(serde::de::Error::custom)
}

fn one() -> f64 {
    1.0
}

fn half_breaks() -> Vec<f64> {
    vec![0.0, 0.5]
}

impl FunctionSpec {
    /// A bare name (`sin`) or a JSON object (`{"name": "coset", "modulus": 4}`).
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let value = if s.starts_with('{') {
            serde_json::from_str::<Value>(s).map_err(|e| format!("invalid function JSON: {e}"))?
        } else {
            serde_json::json!({ "name": s })
        };
        serde_json::from_value(value).map_err(|e| e.to_string())
    }

    pub fn name(&self) -> &'static str {
        match self {
            FunctionSpec::Constant { .. } => "constant",
            FunctionSpec::Sin { .. } => "sin",
            FunctionSpec::Identity { .. } => "identity",
            FunctionSpec::Step { .. } => "step",
            FunctionSpec::Coset { .. } => "coset",
            FunctionSpec::Atoms { .. } => "atoms",
        }
    }
}

/// Stability check for the mollifier: `B(g) = A(g + shift)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    pub epsilon: f64,
    pub eta: f64,
    pub shift: f64,
}

/// Pass/fail thresholds. Only the ones relevant to the command are consulted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    /// space-check: allowed violations per checker (default 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_violations: Option<usize>,
    /// space-check: required total violations (negative controls).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_violations: Option<usize>,
    /// mean: largest coordinate gap to the arithmetic mean (Euclidean only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    /// mean: smallest distance between forward and reversed inductive means.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_order_gap: Option<f64>,
    /// karcher: largest distance between results for reversed atom order (default 2·tol).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_permutation_gap: Option<f64>,
    /// ergodic/holbrook: final delta ceiling per run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_final_delta: Option<f64>,
    /// ergodic/holbrook: final delta floor per run (negative controls).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_final_delta: Option<f64>,
    /// Runs that must meet the per-run thresholds (default all).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_passing: Option<usize>,
    /// holbrook: final delta ceiling as a multiple of the atoms' diameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_diameter_ratio: Option<f64>,
    /// ergodic/holbrook: final delta ceiling as a multiple of the delta at n = 100.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ratio_100: Option<f64>,
    /// ergodic/holbrook: final delta strictly below the delta at n = 100.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub require_decrease: Option<bool>,
    /// mollify: L¹ estimates strictly decreasing along the eta schedule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strictly_decreasing: Option<bool>,
    /// mollify: ceiling on the L¹ estimate at the last eta.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_final_l1: Option<f64>,
}

/// `"auto"` or an explicit point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reference {
    Auto(String),
    Point(Value),
}

impl Reference {
    pub fn parse(s: &str) -> Result<Self, String> {
        if s.trim() == "auto" {
            return Ok(Reference::Auto("auto".into()));
        }
        serde_json::from_str(s).map(Reference::Point).map_err(|e| format!("reference must be \"auto\" or JSON: {e}"))
    }

    pub fn point(&self) -> Option<&Value> {
        match self {
            Reference::Point(v) => Some(v),
            Reference::Auto(_) => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Stem of the output files; defaults to the command name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "function_or_name")]
    pub function: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequences: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<usize>,
    /// Condition-number cap for sampled SPD points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Haar-random starting points per seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_schedule: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_eval: Option<usize>,
    /// Grid size for maxima over the group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assert: Option<Assertions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

/// A problem with one configuration field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_QUADRATURE: usize = 10_000;
pub const DEFAULT_GRID: usize = 200;
pub const DEFAULT_SAMPLES_PER_EVAL: usize = 64;
pub const DEFAULT_CONDITION: f64 = 100.0;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, Diagnostic> {
        serde_json::from_str(text).map_err(|e| Diagnostic::new("config", e.to_string()))
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.seeds.clone().unwrap_or_else(|| vec![7])
    }

    pub fn space_spec(&self) -> Option<SpaceSpec> {
        self.space.as_deref().and_then(|s| SpaceSpec::parse(s).ok())
    }

    pub fn assertions(&self) -> Assertions {
        self.assert.clone().unwrap_or_default()
    }

    pub fn stem(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.command.map_or("run", Command::as_str).to_string())
    }

    /// Every problem that would stop the experiment, without running anything.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let Some(command) = self.command else {
            out.push(Diagnostic::new("command", "missing (space-check, mean, karcher, ergodic, holbrook, mollify)"));
            return out;
        };
        let space = match self.space.as_deref() {
            None => {
                out.push(Diagnostic::new("space", "missing (e.g. spd:3)"));
                None
            }
            Some(s) => match SpaceSpec::parse(s) {
                Ok(sp) => Some(sp),
                Err(e) => {
                    out.push(Diagnostic::new("space", e));
                    None
                }
            },
        };
        if let (Some(SpaceSpec::Broken(_)), true) = (space, command != Command::SpaceCheck || self.suite == Some(Suite::Lemmas)) {
            out.push(Diagnostic::new("space", "broken:d has no barycenters; use it with space-check --suite axioms"));
        }
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                out.push(Diagnostic::new("name", "must be a plain file stem"));
            }
        }
        if let Some(seeds) = &self.seeds {
            if seeds.is_empty() {
                out.push(Diagnostic::new("seeds", "must list at least one seed"));
            }
        }
        positive_count(&mut out, "samples", self.samples);
        positive_count(&mut out, "sequences", self.sequences);
        positive_count(&mut out, "length", self.length);
        positive_count(&mut out, "atoms", self.atoms);
        positive_count(&mut out, "n_max", self.n_max);
        positive_count(&mut out, "starts", self.starts);
        positive_count(&mut out, "quadrature_n", self.quadrature_n);
        positive_count(&mut out, "max_iter", self.max_iter);
        positive_count(&mut out, "samples_per_eval", self.samples_per_eval);
        positive_count(&mut out, "grid_n", self.grid_n);
        positive_real(&mut out, "tol", self.tol);
        if let Some(c) = self.condition {
            if !(1.0..=MAX_SAMPLE_CONDITION).contains(&c) {
                out.push(Diagnostic::new("condition", format!("must lie in [1, {MAX_SAMPLE_CONDITION:e}]")));
            }
        }

        let needs_system = matches!(command, Command::Ergodic | Command::Mollify);
        if needs_system {
            self.validate_system(&mut out);
            match &self.function {
                None => out.push(Diagnostic::new("function", "missing (constant, sin, identity, step, coset, atoms)")),
                Some(f) => self.validate_function(f, &mut out),
            }
            if self.n_max.is_none() && command == Command::Ergodic {
                out.push(Diagnostic::new("n_max", "missing"));
            }
        }
        if command == Command::Holbrook {
            if self.n_max.is_none() {
                out.push(Diagnostic::new("n_max", "missing"));
            }
            if self.atoms.is_none() {
                out.push(Diagnostic::new("atoms", "missing"));
            }
        }
        if command == Command::Mean && self.length.is_none() {
            out.push(Diagnostic::new("length", "missing"));
        }
        if command == Command::Karcher && self.atoms.is_none() {
            out.push(Diagnostic::new("atoms", "missing"));
        }
        if command == Command::Mollify {
            self.validate_mollify(&mut out);
        }
        if let Some(a) = &self.assert {
            for (field, v) in [
                ("assert.max_deviation", a.max_deviation),
                ("assert.min_order_gap", a.min_order_gap),
                ("assert.max_permutation_gap", a.max_permutation_gap),
                ("assert.max_final_delta", a.max_final_delta),
                ("assert.min_final_delta", a.min_final_delta),
                ("assert.max_diameter_ratio", a.max_diameter_ratio),
                ("assert.max_ratio_100", a.max_ratio_100),
                ("assert.max_final_l1", a.max_final_l1),
            ] {
                if let Some(x) = v {
                    if !(x >= 0.0 && x.is_finite()) {
                        out.push(Diagnostic::new(field, "must be a finite nonnegative number"));
                    }
                }
            }
        }
        out
    }

    fn validate_system(&self, out: &mut Vec<Diagnostic>) {
        let Some(sys) = &self.system else {
            out.push(Diagnostic::new("system", "missing (torus:d or cyclic:d)"));
            return;
        };
        if sys.d == 0 {
            out.push(Diagnostic::new("system", "size must be at least 1"));
            return;
        }
        match sys.kind {
            GroupKind::Torus => match &sys.alpha {
                None => out.push(Diagnostic::new("alpha", "torus systems need a rotation (golden or decimal)")),
                Some(a) => {
                    if let Err(e) = a.resolve(sys.d as usize) {
                        out.push(Diagnostic::new("alpha", e));
                    }
                }
            },
            GroupKind::Cyclic => {
                if sys.alpha.is_some() {
                    out.push(Diagnostic::new("alpha", "cyclic systems take a generator, not alpha"));
                }
            }
        }
    }

    fn validate_function(&self, f: &FunctionSpec, out: &mut Vec<Diagnostic>) {
        let torus = self.system.as_ref().map(|s| s.kind == GroupKind::Torus);
        let needs_torus = !matches!(f, FunctionSpec::Constant { .. } | FunctionSpec::Atoms { .. });
        if needs_torus && torus == Some(false) {
            out.push(Diagnostic::new("function", format!("{} is defined on the circle; use a torus system", f.name())));
        }
        match f {
            FunctionSpec::Sin { amplitude, .. } | FunctionSpec::Coset { amplitude, .. } if !amplitude.is_finite() => {
                out.push(Diagnostic::new("function.amplitude", "must be finite"));
            }
            FunctionSpec::Coset { modulus: 0, .. } => {
                out.push(Diagnostic::new("function.modulus", "must be at least 1"));
            }
            FunctionSpec::Step { breaks, jump, directions } => {
                if !(*jump > 0.0 && jump.is_finite()) {
                    out.push(Diagnostic::new("function.jump", "must be positive"));
                }
                let increasing = breaks.windows(2).all(|w| w[0] < w[1]);
                if breaks.len() < 2 || !increasing || breaks[0] < 0.0 || breaks[breaks.len() - 1] >= 1.0 {
                    out.push(Diagnostic::new("function.breaks", "need at least two strictly increasing values in [0, 1)"));
                }
                if let Some(d) = directions {
                    if d.len() + 1 != breaks.len() {
                        out.push(Diagnostic::new("function.directions", "need one direction per piece after the first"));
                    }
                }
            }
            FunctionSpec::Atoms { points } => {
                if torus == Some(true) {
                    out.push(Diagnostic::new("function", "atoms are indexed by residues; use a cyclic system"));
                }
                if let (Some(p), Some(sys)) = (points, &self.system) {
                    if p.len() as u64 != sys.d {
                        out.push(Diagnostic::new("function.points", format!("cyclic:{} needs {} points", sys.d, sys.d)));
                    }
                }
            }
            _ => {}
        }
    }

    fn validate_mollify(&self, out: &mut Vec<Diagnostic>) {
        match &self.eta_schedule {
            None => out.push(Diagnostic::new("eta", "missing eta schedule")),
            Some(etas) if etas.is_empty() => out.push(Diagnostic::new("eta", "schedule is empty")),
            Some(etas) => {
                if etas.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                    out.push(Diagnostic::new("eta", "every eta must be positive"));
                }
            }
        }
        if let Some(s) = &self.stability {
            positive_real(out, "stability.epsilon", Some(s.epsilon));
            positive_real(out, "stability.eta", Some(s.eta));
            if !s.shift.is_finite() {
                out.push(Diagnostic::new("stability.shift", "must be finite"));
            }
        }
    }
}

fn positive_count(out: &mut Vec<Diagnostic>, field: &str, v: Option<usize>) {
    if v == Some(0) {
        out.push(Diagnostic::new(field, "must be at least 1"));
    }
}

fn positive_real(out: &mut Vec<Diagnostic>, field: &str, v: Option<f64>) {
    if let Some(x) = v {
        if !(x > 0.0 && x.is_finite()) {
            out.push(Diagnostic::new(field, format!("must be positive, got {x}")));
        }
    }
}

/// True when some coordinate of `alpha` is within `1e-12` of `p/q` with `q ≤ 1000`.
pub fn looks_rational(alpha: &[f64]) -> bool {
    alpha.iter().any(|&a| (1..=1000u32).any(|q| {
        let x = a * q as f64;
        (x - x.round()).abs() < 1e-12 * q as f64
    }))
}
