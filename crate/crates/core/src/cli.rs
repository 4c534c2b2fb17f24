//! Command-line front end.
//!
//! Exit codes: 0 when every requested run completed (stalled phases count as
//! completed), 2 for config errors, 3 for capability errors, 1 for I/O.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::adversaries::AdversarySpec;
use crate::breadth::Notion;
use crate::collections::{Capability, Collection, CollectionName};
use crate::conditions::{check_angluin, check_weak_angluin, closure_dimension, ClosureDimension, ConditionCertificate, SearchBounds};
use crate::error::{Error, Result};
use crate::generators::{GeneratorKind, GeneratorParams};
use crate::sim::{
    estimate_error_rate, resummarize, run_duel, run_matrix, summary_table, DuelConfig, RatePoint, RunMatrixConfig, RunReport, StepTrace,
    SCHEMA_VERSION,
};

#[derive(Debug, Parser)]
#[command(name = "genlimit", version, about = "Generation-in-the-limit simulation lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the tell-tale conditions and closure dimension of a collection.
    Check(CheckArgs),
    /// Run one generator against one adversary.
    Duel(DuelArgs),
    /// Run a grid of duels concurrently.
    Matrix(MatrixArgs),
    /// Estimate the error rate under an i.i.d. adversary.
    Rate(RateArgs),
    /// Recompute counters and n* from a stored trace file.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub collection: CollectionName,
    #[arg(long, default_value_t = 25)]
    pub max_index: usize,
    #[arg(long, default_value_t = 3)]
    pub max_telltale_size: usize,
    #[arg(long, default_value_t = 100)]
    pub domain_horizon: usize,
    #[arg(long, default_value_t = 3)]
    pub chain_depth: usize,
    /// Oracles to withdraw before checking.
    #[arg(long, value_delimiter = ',')]
    pub withhold: Vec<Capability>,
    /// Write the certificates here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flags shared by every duel-shaped subcommand.
#[derive(Debug, Args)]
pub struct DuelFlags {
    #[arg(long)]
    pub collection: Option<CollectionName>,
    #[arg(long)]
    pub generator: Option<GeneratorKind>,
    /// canonical, lb-phase, stable-coverage or iid.
    #[arg(long, default_value = "canonical")]
    pub adversary: String,
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long)]
    pub star: Option<usize>,
    /// Notions to check; the first one is checked every step.
    #[arg(long, value_delimiter = ',')]
    pub notion: Vec<Notion>,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub closure_dimension: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub withhold: Vec<Capability>,
}

#[derive(Debug, Args)]
pub struct DuelArgs {
    /// JSON duel config; flags given alongside it override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: DuelFlags,
    /// Directory for trace.jsonl, report.json and summary.md.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// JSON matrix config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub collection: Vec<CollectionName>,
    #[arg(long, value_delimiter = ',')]
    pub generator: Vec<GeneratorKind>,
    #[arg(long, default_value = "canonical")]
    pub adversary: String,
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long)]
    pub star: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub notion: Vec<Notion>,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub closure_dimension: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long)]
    pub collection: CollectionName,
    #[arg(long)]
    pub generator: GeneratorKind,
    #[arg(long)]
    pub target: usize,
    #[arg(long)]
    pub notion: Notion,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Largest step of the grid `1..=n_max`.
    #[arg(long, default_value_t = 50)]
    pub n_max: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub closure_dimension: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A trace.jsonl file written by `duel` or `matrix`.
    pub trace: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

fn write_traces(path: &Path, traces: &[StepTrace]) -> Result<()> {
    let file = fs::File::create(path).map_err(io)?;
    let mut w = std::io::BufWriter::new(file);
    for t in traces {
        serde_json::to_writer(&mut w, t).map_err(|e| Error::Io(e.to_string()))?;
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Builds an adversary from flags.
pub fn adversary_from_flags(kind: &str, target: Option<usize>, star: Option<usize>, notion: Option<Notion>, budget: Option<u64>) -> Result<AdversarySpec> {
    let need_target = || target.ok_or_else(|| Error::config("target", format!("the {kind} adversary needs --target")));
    match kind.to_ascii_lowercase().replace('_', "-").as_str() {
        "canonical" => Ok(AdversarySpec::Canonical {
            target: need_target()?,
            repeat: 1,
        }),
        "iid" => Ok(AdversarySpec::Iid { target: need_target()? }),
        "lb-phase" => Ok(AdversarySpec::LbPhase {
            star: star.ok_or_else(|| Error::config("star", "the lb-phase adversary needs --star"))?,
            predicate: notion.ok_or_else(|| Error::config("notion", "the lb-phase adversary needs --notion"))?,
            budget,
            rival_bound: None,
        }),
        "stable-coverage" => Ok(AdversarySpec::StableCoverage { budget }),
        other => Err(Error::config("adversary", format!("unknown adversary `{other}`"))),
    }
}

/// Generator capability gaps found while parsing are config errors.
fn as_config(e: Error) -> Error {
    match e {
        Error::CapabilityMissing { .. } | Error::WrongCollection { .. } => Error::config("generator", e.to_string()),
        e => e,
    }
}

/// Reads a duel config from a file and/or flags, fills defaults, rejects
/// unknown keys, and checks the generator against the collection.
pub fn parse_duel_config(path: Option<&Path>, f: &DuelFlags) -> Result<DuelConfig> {
    let mut cfg = match path {
        Some(p) => serde_json::from_str::<DuelConfig>(&read(p)?).map_err(|e| Error::config("config", e.to_string()))?,
        None => {
            let collection = f.collection.ok_or_else(|| Error::config("collection", "missing --collection"))?;
            let generator = f.generator.ok_or_else(|| Error::config("generator", "missing --generator"))?;
            let adversary = adversary_from_flags(&f.adversary, f.target, f.star, f.notion.first().copied(), f.budget)?;
            DuelConfig::new(collection, generator, adversary)
        }
    };
    if path.is_some() {
        if let Some(c) = f.collection {
            cfg.collection = c;
        }
        if let Some(g) = f.generator {
            cfg.generator = g;
        }
    }
    if !f.notion.is_empty() {
        cfg.notions = f.notion.clone();
    }
    if let Some(h) = f.horizon {
        cfg.horizon = h;
    }
    if let Some(s) = f.seed {
        cfg.seed = s;
    }
    if f.closure_dimension.is_some() {
        cfg.generator_params = GeneratorParams {
            closure_dimension: f.closure_dimension,
        };
    }
    if !f.withhold.is_empty() {
        cfg.withheld_capabilities = f.withhold.clone();
    }
    cfg.validate_fields()?;
    cfg.generator.validate(&cfg.collection()).map_err(as_config)?;
    Ok(cfg)
}

pub fn parse_matrix_config(a: &MatrixArgs) -> Result<RunMatrixConfig> {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_str::<RunMatrixConfig>(&read(p)?).map_err(|e| Error::config("config", e.to_string()))?,
        None => RunMatrixConfig {
            collections: a.collection.clone(),
            generators: a.generator.clone(),
            adversaries: vec![adversary_from_flags(&a.adversary, a.target, a.star, a.notion.first().copied(), a.budget)?],
            notions: a.notion.clone(),
            generator_params: GeneratorParams {
                closure_dimension: a.closure_dimension,
            },
            horizon: a.horizon.unwrap_or(crate::sim::DEFAULT_HORIZON),
            seed: a.seed.unwrap_or(0),
            out_dir: None,
        },
    };
    if let Some(out) = &a.out {
        cfg.out_dir = Some(out.display().to_string());
    }
    cfg.cells()?;
    Ok(cfg)
}

#[derive(Debug, Serialize)]
struct CheckReport {
    schema_version: u32,
    collection: CollectionName,
    bounds: SearchBounds,
    angluin: ConditionCertificate,
    weak_angluin: ConditionCertificate,
    closure_dimension: ClosureDimension,
}

fn cmd_check(a: &CheckArgs) -> Result<String> {
    let bounds = SearchBounds::new(a.max_index, a.max_telltale_size, a.domain_horizon, a.chain_depth)?;
    let c = a.withhold.iter().fold(Collection::builtin(a.collection), |c, &cap| c.without(cap));
    let report = CheckReport {
        schema_version: SCHEMA_VERSION,
        collection: a.collection,
        bounds,
        angluin: check_angluin(&c, &bounds)?,
        weak_angluin: check_weak_angluin(&c, &bounds)?,
        closure_dimension: closure_dimension(&c, &bounds)?,
    };
    let json = to_json(&report);
    let mut msg = format!(
        "{}: angluin {}, weak angluin {}\n",
        a.collection,
        report.angluin.label(),
        report.weak_angluin.label()
    );
    match &a.out {
        Some(p) => write_file(p, &json)?,
        None => msg.push_str(&json),
    }
    Ok(msg)
}

fn duel_name(c: &DuelConfig) -> String {
    format!("{} x {} x {}", c.collection, c.generator.as_str(), c.adversary.label())
}

fn duel_line(r: &RunReport) -> String {
    let mut s = format!(
        "{}: steps {}, C_B {}, C_S {}",
        duel_name(&r.config),
        r.steps,
        r.counters.c_b,
        r.counters.c_s
    );
    for (n, v) in &r.n_star {
        match v {
            Some(v) => s.push_str(&format!(", n*[{}] = {v}", n.as_str())),
            None => s.push_str(&format!(", n*[{}] = none", n.as_str())),
        }
    }
    if r.closed_phases > 0 {
        s.push_str(&format!(", {} closed phases", r.closed_phases));
    }
    if let Some(stall) = &r.stall {
        s.push_str(&format!(", stalled: {}", stall.verdict));
    }
    s
}

fn cmd_duel(a: &DuelArgs) -> Result<String> {
    let cfg = parse_duel_config(a.config.as_deref(), &a.flags)?;
    let (traces, report) = run_duel(&cfg)?;
    let label = duel_line(&report);
    let table = summary_table(&[(duel_name(&cfg), &report)]);
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(io)?;
            write_traces(&dir.join("trace.jsonl"), &traces)?;
            write_file(&dir.join("report.json"), &to_json(&report))?;
            write_file(&dir.join("summary.md"), &table)?;
            Ok(format!("{label}\n{table}"))
        }
        None => Ok(format!("{label}\n{table}{}\n", to_json(&report))),
    }
}

fn cmd_matrix(a: &MatrixArgs) -> Result<String> {
    let cfg = parse_matrix_config(a)?;
    let results = run_matrix(&cfg)?;
    let mut out = String::new();
    let mut rows = Vec::new();
    for (r, _) in &results {
        let c = &r.cell.config;
        let name = format!("#{} {}", r.cell.id, duel_name(c));
        match (&r.report, &r.cell.not_applicable, &r.error) {
            (Some(rep), _, _) => {
                out.push_str(&format!("#{} {}\n", r.cell.id, duel_line(rep)));
                rows.push((name, rep));
            }
            (_, Some(why), _) => out.push_str(&format!("{name}: not applicable ({why})\n")),
            (_, _, Some(err)) => out.push_str(&format!("{name}: error ({err})\n")),
            _ => {}
        }
    }
    let table = summary_table(&rows);
    out.push_str(&table);
    if let Some(dir) = cfg.out_dir.as_deref().map(Path::new) {
        fs::create_dir_all(dir).map_err(io)?;
        for (r, traces) in &results {
            if let Some(rep) = &r.report {
                write_traces(&dir.join(format!("cell-{}.trace.jsonl", r.cell.id)), traces)?;
                write_file(&dir.join(format!("cell-{}.report.json", r.cell.id)), &to_json(rep))?;
            }
        }
        let index: Vec<_> = results.iter().map(|(r, _)| r).collect();
        write_file(&dir.join("matrix.json"), &to_json(&index))?;
        write_file(&dir.join("summary.md"), &table)?;
    }
    if let Some((r, _)) = results.iter().find(|(r, _)| r.error.is_some()) {
        return Err(Error::ContractViolation(format!("cell {} failed: {}", r.cell.id, r.error.as_deref().unwrap_or(""))));
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct RateReport {
    schema_version: u32,
    collection: CollectionName,
    generator: GeneratorKind,
    target: usize,
    notion: Notion,
    trials: u64,
    seed: u64,
    points: Vec<RatePoint>,
}

fn cmd_rate(a: &RateArgs) -> Result<String> {
    let flags = DuelFlags {
        collection: Some(a.collection),
        generator: Some(a.generator),
        adversary: "iid".into(),
        target: Some(a.target),
        star: None,
        notion: vec![a.notion],
        horizon: Some(a.n_max.max(1)),
        seed: Some(a.seed),
        budget: None,
        closure_dimension: a.closure_dimension,
        withhold: Vec::new(),
    };
    let cfg = parse_duel_config(None, &flags)?;
    cfg.validate()?;
    let grid: Vec<u64> = (1..=a.n_max).collect();
    let points = estimate_error_rate(&cfg, a.notion, a.trials, &grid)?;
    let report = RateReport {
        schema_version: SCHEMA_VERSION,
        collection: a.collection,
        generator: a.generator,
        target: a.target,
        notion: a.notion,
        trials: a.trials,
        seed: a.seed,
        points,
    };
    let mut table = String::from("| n | error |\n|---|---|\n");
    for p in &report.points {
        table.push_str(&format!("| {} | {:.3} |\n", p.n, p.error));
    }
    if let Some(p) = &a.out {
        write_file(p, &to_json(&report))?;
    }
    Ok(table)
}

fn cmd_report(a: &ReportArgs) -> Result<String> {
    let text = read(&a.trace)?;
    let traces = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, l)| serde_json::from_str::<StepTrace>(l).map_err(|e| Error::config("trace", format!("line {}: {e}", k + 1))))
        .collect::<Result<Vec<_>>>()?;
    let (counters, n_star) = resummarize(&traces);
    let mut out = format!("steps {}, C_B {}, C_S {}\n", traces.len(), counters.c_b, counters.c_s);
    for (n, v) in n_star {
        out.push_str(&format!("n*[{}] = {}\n", n.as_str(), v.map_or("none".to_string(), |v| v.to_string())));
    }
    Ok(out)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => 2,
        e if e.is_capability() => 3,
        _ => 1,
    }
}

/// Runs a parsed command and returns its text output.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Duel(a) => cmd_duel(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Rate(a) => cmd_rate(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
