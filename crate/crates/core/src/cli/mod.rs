//! Experiment runner behind the `hadamard` binary.
//!
//! Every subcommand reads an optional JSON config (`--config`), applies flag
//! overrides, validates the result and only then computes. Outputs are a CSV
//! file and a metadata JSON file in the output directory, which comes from
//! `--out-dir`, the config, `$HADAMARD_OUT_DIR` or `hadamard-out`, in that order.
//!
//! Exit status: 0 when every assertion passes, 1 on an assertion or numeric
//! failure, 2 on a usage error.

pub mod config;
pub mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use config::{Diagnostic, ExperimentConfig};
use config::{Command, FunctionSpec, Reference, Suite, SystemConfig};
use experiments::{Failure, Report};

pub const OUT_DIR_ENV: &str = "HADAMARD_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "hadamard-out";

#[derive(Debug, Parser)]
#[command(name = "hadamard", version, about = "Barycenters, inductive means and ergodic averages in Hadamard spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Count violations of the comparison inequalities (or the mean lemmas) on seeded samples.
    SpaceCheck(RunArgs),
    /// Compare inductive means with arithmetic means and with the reversed sequence.
    Mean(RunArgs),
    /// Solve for the Karcher mean of seeded random atoms.
    Karcher(RunArgs),
    /// Inductive means along orbits of a Kronecker system.
    Ergodic(RunArgs),
    /// Inductive means of a periodic sequence of atoms against their Karcher mean.
    Holbrook(RunArgs),
    /// L¹ distance between a function and its mollifications.
    Mollify(RunArgs),
}

impl CliCommand {
    fn split(self) -> (Command, RunArgs) {
        match self {
            CliCommand::SpaceCheck(a) => (Command::SpaceCheck, a),
            CliCommand::Mean(a) => (Command::Mean, a),
            CliCommand::Karcher(a) => (Command::Karcher, a),
            CliCommand::Ergodic(a) => (Command::Ergodic, a),
            CliCommand::Holbrook(a) => (Command::Holbrook, a),
            CliCommand::Mollify(a) => (Command::Mollify, a),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// euclid:D, spd:N, hyperboloid:D or broken:D
    #[arg(long)]
    pub space: Option<String>,
    /// torus:D or cyclic:D
    #[arg(long)]
    pub system: Option<String>,
    /// Torus rotation: golden, or decimals separated by commas.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Generator of a cyclic system.
    #[arg(long)]
    pub generator: Option<u64>,
    /// Override the ergodicity flag of a torus rotation.
    #[arg(long)]
    pub ergodic: Option<bool>,
    /// Function name (constant, sin, identity, step, coset, atoms) or a JSON object.
    #[arg(long)]
    pub function: Option<String>,
    /// axioms or lemmas (space-check).
    #[arg(long, value_parser = ["axioms", "lemmas"])]
    pub suite: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub sequences: Option<usize>,
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub atoms: Option<usize>,
    /// Condition-number cap for sampled SPD matrices.
    #[arg(long)]
    pub condition: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Haar-random starting points per seed.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Seeds, repeated or comma-separated.
    #[arg(long = "seed", value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// "auto" or a JSON point.
    #[arg(long)]
    pub reference: Option<String>,
    #[arg(long)]
    pub quadrature_n: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Mollifier radii, repeated or comma-separated.
    #[arg(long = "eta", value_delimiter = ',', allow_negative_numbers = true)]
    pub eta: Vec<f64>,
    #[arg(long)]
    pub samples_per_eval: Option<usize>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Stem of the output files.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Validate and print the merged config without running.
    #[arg(long)]
    pub dry_run: bool,
}

/// Loads the config file (if any) and applies the flags on top.
pub fn merge(command: Command, args: &RunArgs) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    let mut cfg = match &args.config {
        None => ExperimentConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| vec![Diagnostic::new("config", format!("cannot read {}: {e}", path.display()))])?;
            ExperimentConfig::from_json(&text).map_err(|d| vec![d])?
        }
    };
    let mut diags = Vec::new();
    match cfg.command {
        Some(c) if c != command => diags.push(Diagnostic::new(
            "command",
            format!("config is for {}, but the {} subcommand was invoked", c.as_str(), command.as_str()),
        )),
        _ => cfg.command = Some(command),
    }
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = &args.$field {
                cfg.$field = Some(v.clone());
            }
        };
    }
    set!(space);
    set!(samples);
    set!(sequences);
    set!(length);
    set!(atoms);
    set!(condition);
    set!(n_max);
    set!(starts);
    set!(quadrature_n);
    set!(tol);
    set!(max_iter);
    set!(samples_per_eval);
    set!(grid_n);
    set!(name);
    set!(out_dir);
    if let Some(s) = &args.suite {
        cfg.suite = Some(if s == "lemmas" { Suite::Lemmas } else { Suite::Axioms });
    }
    if !args.seeds.is_empty() {
        cfg.seeds = Some(args.seeds.clone());
    }
    if !args.eta.is_empty() {
        cfg.eta_schedule = Some(args.eta.clone());
    }
    if let Some(s) = &args.system {
        match SystemConfig::parse_into(s, cfg.system.take()) {
            Ok(sys) => cfg.system = Some(sys),
            Err(e) => diags.push(Diagnostic::new("system", e)),
        }
    }
    if args.alpha.is_some() || args.generator.is_some() || args.ergodic.is_some() {
        match cfg.system.as_mut() {
            None => diags.push(Diagnostic::new("system", "--alpha/--generator/--ergodic need a system")),
            Some(sys) => {
                if let Some(a) = &args.alpha {
                    sys.alpha = Some(config::AlphaSpec::Text(a.clone()));
                }
                if let Some(g) = args.generator {
                    sys.generator = Some(g);
                }
                if let Some(e) = args.ergodic {
                    sys.ergodic = Some(e);
                }
            }
        }
    }
    if let Some(f) = &args.function {
        match FunctionSpec::parse(f) {
            Ok(spec) => cfg.function = Some(spec),
            Err(e) => diags.push(Diagnostic::new("function", e)),
        }
    }
    if let Some(r) = &args.reference {
        match Reference::parse(r) {
            Ok(r) => cfg.reference = Some(r),
            Err(e) => diags.push(Diagnostic::new("reference", e)),
        }
    }
    if diags.is_empty() {
        Ok(cfg)
    } else {
        Err(diags)
    }
}

/// All diagnostics for a config, including those that need the concrete space.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut d = cfg.validate();
    if d.is_empty() {
        d = experiments::validate_values(cfg);
    }
    d
}

/// Paths written by [`execute`].
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub metadata: PathBuf,
    pub passed: bool,
}

pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Validates, runs and writes the artifacts. Printing is left to the caller.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Report, Artifacts), Failure> {
    let diags = validate(cfg);
    if !diags.is_empty() {
        return Err(Failure::Usage(diags));
    }
    let started = Instant::now();
    let report = experiments::run(cfg)?;
    let wall = started.elapsed().as_secs_f64();
    let passed = report.checks.iter().all(|c| c.passed);

    let dir = output_dir(cfg);
    let io_fail = |e: std::io::Error| Failure::Numeric { operation: format!("writing to {}", dir.display()), message: e.to_string() };
    std::fs::create_dir_all(&dir).map_err(io_fail)?;
    let stem = cfg.stem();
    let csv = dir.join(format!("{stem}.csv"));
    let metadata = dir.join(format!("{stem}.json"));
    let meta = json!({
        "command": cfg.command.map(Command::as_str),
        "config": cfg,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": wall,
        "ergodic": report.ergodic,
        "warnings": report.warnings,
        "assertions": report.checks,
        "passed": passed,
        "results": report.results,
    });
    std::fs::write(&csv, &report.csv).map_err(io_fail)?;
    std::fs::write(&metadata, serde_json::to_string_pretty(&meta).expect("metadata serializes")).map_err(io_fail)?;
    Ok((report, Artifacts { csv, metadata, passed }))
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("error: {d}");
    }
}

/// Parses `std::env::args`, runs the subcommand and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = cli.command.split();
    let cfg = match merge(command, &args) {
        Ok(c) => c,
        Err(d) => {
            print_diagnostics(&d);
            return ExitCode::from(2);
        }
    };
    if args.dry_run {
        let d = validate(&cfg);
        if d.is_empty() {
            println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
            return ExitCode::SUCCESS;
        }
        print_diagnostics(&d);
        return ExitCode::from(2);
    }
    match execute(&cfg) {
        Ok((report, art)) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("wrote {} and {}", art.csv.display(), art.metadata.display());
            if art.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(d)) => {
            print_diagnostics(&d);
            ExitCode::from(2)
        }
        Err(Failure::Numeric { operation, message }) => {
            eprintln!("error in {operation}: {message}");
            ExitCode::from(1)
        }
    }
}
