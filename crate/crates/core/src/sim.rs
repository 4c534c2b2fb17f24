//! Duel driver, stability counters, run reports, run matrices, and the
//! error-rate harness.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversaries::{Adversary, AdversarySpec, CoveragePhase, GenView, PhaseRecord, Stall, DEFAULT_RIVAL_BOUND};
use crate::breadth::{evaluate, Notion, View};
use crate::collections::{Capability, Collection, CollectionName};
use crate::error::{Error, Result};
use crate::generators::{Generator, GeneratorKind, GeneratorParams, Output};
use crate::sets::{Cardinality, Elem};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_HORIZON: u64 = 10_000;

fn default_horizon() -> u64 {
    DEFAULT_HORIZON
}

/// Independent per-index seed derived from a base seed.
pub fn derive_seed(seed: u64, i: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DuelConfig {
    pub collection: CollectionName,
    /// Oracles to withdraw from the collection.
    #[serde(default)]
    pub withheld_capabilities: Vec<Capability>,
    pub generator: GeneratorKind,
    #[serde(default)]
    pub generator_params: GeneratorParams,
    pub adversary: AdversarySpec,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    /// Steps at which every requested notion is checked. Defaults to every
    /// step up to 1000, then powers of two, then the horizon.
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
    /// The first notion is checked at every step and drives `C_B`.
    #[serde(default)]
    pub notions: Vec<Notion>,
    #[serde(default)]
    pub rival_bound: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl DuelConfig {
    pub fn new(collection: CollectionName, generator: GeneratorKind, adversary: AdversarySpec) -> Self {
        DuelConfig {
            collection,
            withheld_capabilities: Vec::new(),
            generator,
            generator_params: GeneratorParams::default(),
            adversary,
            horizon: DEFAULT_HORIZON,
            checkpoints: None,
            notions: Vec::new(),
            rival_bound: None,
            seed: 0,
        }
    }

    pub fn collection(&self) -> Collection {
        self.withheld_capabilities
            .iter()
            .fold(Collection::builtin(self.collection), |c, &cap| c.without(cap))
    }

    /// Requested notions, or a default fitted to the adversary.
    pub fn effective_notions(&self) -> Vec<Notion> {
        if !self.notions.is_empty() {
            return self.notions.clone();
        }
        match self.adversary {
            AdversarySpec::LbPhase { predicate, .. } => vec![predicate],
            AdversarySpec::StableCoverage { .. } => vec![Notion::InfiniteCoverage],
            _ => vec![Notion::Exact],
        }
    }

    pub fn effective_checkpoints(&self) -> Vec<u64> {
        match &self.checkpoints {
            Some(c) => {
                let mut c = c.clone();
                c.sort_unstable();
                c.dedup();
                c
            }
            None => {
                let mut c: Vec<u64> = (1..=self.horizon.min(1000)).collect();
                let mut p = 1024;
                while p < self.horizon {
                    c.push(p);
                    p *= 2;
                }
                if c.last() != Some(&self.horizon) {
                    c.push(self.horizon);
                }
                c
            }
        }
    }

    /// Field-level checks that do not need to build anything.
    pub fn validate_fields(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::config("horizon", "must be at least 1"));
        }
        if let Some(c) = &self.checkpoints {
            if let Some(bad) = c.iter().find(|&&s| s == 0 || s > self.horizon) {
                return Err(Error::config("checkpoints", format!("{bad} is outside 1..={}", self.horizon)));
            }
        }
        Ok(())
    }

    /// Full validation: fields, generator capabilities, adversary setup.
    pub fn validate(&self) -> Result<()> {
        self.validate_fields()?;
        let c = self.collection();
        self.generator.validate(&c)?;
        Adversary::new(&self.adversary, &c, 0)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotionCheck {
    pub notion: Notion,
    pub holds: bool,
    pub hallucination_card: Cardinality,
    pub missing_card: Cardinality,
}

/// One record per step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTrace {
    pub schema_version: u32,
    pub step: u64,
    pub emitted: Elem,
    pub seen_size: u64,
    /// Support summary, or the output enumeration's stream summary.
    pub descriptor: String,
    pub first: Option<Elem>,
    pub index: Option<usize>,
    /// Prefix counter of enumerating generators.
    pub counter: Option<u64>,
    /// One element drawn from the output.
    pub generated: Elem,
    /// Output differs structurally from the previous step's.
    pub changed: bool,
    /// Language the verdicts are judged against.
    pub target: usize,
    /// The first requested notion, checked every step.
    pub primary: Option<NotionCheck>,
    /// Every requested notion, at checkpoints only.
    pub verdicts: BTreeMap<Notion, NotionCheck>,
    pub phase: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityCounters {
    /// Steps where the primary notion failed.
    pub c_b: u64,
    /// Steps `n ≥ 2` whose output differs from step `n - 1`.
    pub c_s: u64,
}

pub fn stability_counters(traces: &[StepTrace]) -> StabilityCounters {
    StabilityCounters {
        c_b: traces.iter().filter(|t| t.primary.is_some_and(|p| !p.holds)).count() as u64,
        c_s: traces.iter().filter(|t| t.changed).count() as u64,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "phases", rename_all = "snake_case")]
pub enum PhaseLog {
    None,
    LowerBound(Vec<PhaseRecord>),
    Coverage(Vec<CoveragePhase>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalVerdict {
    pub notion: Notion,
    pub target: usize,
    pub check: NotionCheck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: DuelConfig,
    pub steps: u64,
    /// First step from which each notion held through the horizon, judged
    /// at the steps where it was checked. `None` if it failed at the end.
    pub n_star: BTreeMap<Notion, Option<u64>>,
    pub counters: StabilityCounters,
    pub phase_log: PhaseLog,
    pub closed_phases: usize,
    pub stall: Option<Stall>,
    pub committed_target: usize,
    pub final_index: Option<usize>,
    pub final_verdicts: Vec<FinalVerdict>,
    /// Violation point the phased adversary relied on.
    pub violation_point: Option<String>,
}

/// A generator and an adversary in lock step.
pub struct Duel {
    notions: Vec<Notion>,
    checkpoints: Vec<u64>,
    next_checkpoint: usize,
    rival_bound: usize,
    collection: Collection,
    generator: Generator,
    adversary: Adversary,
    rng: ChaCha8Rng,
    step: u64,
}

impl Duel {
    pub fn new(cfg: &DuelConfig) -> Result<Self> {
        cfg.validate_fields()?;
        let collection = cfg.collection();
        let generator = Generator::new(cfg.generator, collection.clone(), cfg.generator_params)?;
        let adversary = Adversary::new(&cfg.adversary, &collection, derive_seed(cfg.seed, 0))?;
        Ok(Duel {
            notions: cfg.effective_notions(),
            checkpoints: cfg.effective_checkpoints(),
            next_checkpoint: 0,
            rival_bound: cfg.rival_bound.unwrap_or(DEFAULT_RIVAL_BOUND),
            collection,
            generator,
            adversary,
            rng: ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 1)),
            step: 0,
        })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn adversary(&self) -> &Adversary {
        &self.adversary
    }

    pub fn check(&self, notion: Notion, target: usize) -> Result<NotionCheck> {
        let out = self.generator.output().effective();
        let view = View {
            output: &out,
            seen: self.generator.seen(),
            firsts: self.generator.firsts(),
        };
        let v = evaluate(notion, &view, &self.collection, target, self.rival_bound)?;
        Ok(NotionCheck {
            notion,
            holds: v.holds,
            hallucination_card: v.evidence.hallucination_card,
            missing_card: v.evidence.missing_card,
        })
    }

    /// Advances one step and records it.
    pub fn step(&mut self) -> Result<StepTrace> {
        let x = self.adversary.next(&GenView::of(&self.generator))?;
        let previous: Option<Output> = (self.step > 0).then(|| self.generator.output().clone());
        self.generator.step(x)?;
        self.step += 1;
        let n = self.step;
        let output = self.generator.output();
        let changed = previous.is_some_and(|p| &p != output);
        let target = self.adversary.committed_target();
        let primary = match self.notions.first() {
            Some(&p) => Some(self.check(p, target)?),
            None => None,
        };
        let mut verdicts = BTreeMap::new();
        while self.next_checkpoint < self.checkpoints.len() && self.checkpoints[self.next_checkpoint] < n {
            self.next_checkpoint += 1;
        }
        if self.checkpoints.get(self.next_checkpoint) == Some(&n) {
            for (k, &notion) in self.notions.iter().enumerate() {
                let check = match (k, primary) {
                    (0, Some(p)) => p,
                    _ => self.check(notion, target)?,
                };
                verdicts.insert(notion, check);
            }
        }
        let generated = self.generator.emit(&mut self.rng)?;
        let output = self.generator.output();
        Ok(StepTrace {
            schema_version: SCHEMA_VERSION,
            step: n,
            emitted: x,
            seen_size: self.generator.seen().len(),
            descriptor: output.summary(),
            first: output.first(),
            index: self.generator.index(),
            counter: self.generator.kind().enumerates().then(|| self.generator.counter()),
            generated,
            changed,
            target,
            primary,
            verdicts,
            phase: self.adversary.phase_tag(),
        })
    }
}

/// Earliest checked step from which the notion held at every later check.
/// Uses the per-step record when the notion was the primary one.
pub fn n_star(traces: &[StepTrace], notion: Notion) -> Option<u64> {
    let is_primary = traces.iter().any(|t| t.primary.is_some_and(|p| p.notion == notion));
    let checks = traces.iter().filter_map(|t| {
        let check = if is_primary { t.primary } else { t.verdicts.get(&notion).copied() };
        check.map(|c| (t.step, c.holds))
    });
    let checks: Vec<(u64, bool)> = checks.collect();
    let mut start = None;
    for &(step, holds) in checks.iter().rev() {
        if !holds {
            break;
        }
        start = Some(step);
    }
    start
}

fn summarize(cfg: &DuelConfig, traces: &[StepTrace], duel: &Duel) -> Result<RunReport> {
    let notions = cfg.effective_notions();
    let target = duel.adversary.committed_target();
    let mut final_verdicts = Vec::new();
    for &notion in &notions {
        if duel.step > 0 {
            final_verdicts.push(FinalVerdict {
                notion,
                target,
                check: duel.check(notion, target)?,
            });
        }
    }
    let (phase_log, closed_phases, violation_point) = match &duel.adversary {
        Adversary::LbPhase(a) => {
            let kind = match cfg.adversary {
                AdversarySpec::LbPhase { predicate, .. } => predicate.witness_kind().map(|k| k.as_str()),
                _ => None,
            };
            let AdversarySpec::LbPhase { star, .. } = cfg.adversary else { unreachable!() };
            (
                PhaseLog::LowerBound(a.phases().to_vec()),
                a.closed_phases(),
                Some(format!("{} star {} {}", cfg.collection, star, kind.unwrap_or("?"))),
            )
        }
        Adversary::StableCoverage(a) => (PhaseLog::Coverage(a.phases().to_vec()), a.closed_phases(), None),
        _ => (PhaseLog::None, 0, None),
    };
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        steps: duel.step,
        n_star: notions.iter().map(|&n| (n, n_star(traces, n))).collect(),
        counters: stability_counters(traces),
        phase_log,
        closed_phases,
        stall: duel.adversary.stall().cloned(),
        committed_target: target,
        final_index: duel.generator.index(),
        final_verdicts,
        violation_point,
    })
}

/// Runs `cfg.horizon` steps. Stalled phases end up in the report.
pub fn run_duel(cfg: &DuelConfig) -> Result<(Vec<StepTrace>, RunReport)> {
    let mut duel = Duel::new(cfg)?;
    let mut traces = Vec::with_capacity(cfg.horizon.min(1 << 20) as usize);
    for _ in 0..cfg.horizon {
        traces.push(duel.step()?);
    }
    let report = summarize(cfg, &traces, &duel)?;
    Ok((traces, report))
}

/// Recomputes counters and `n*` from stored traces.
pub fn resummarize(traces: &[StepTrace]) -> (StabilityCounters, BTreeMap<Notion, Option<u64>>) {
    let mut notions: Vec<Notion> = traces.iter().flat_map(|t| t.verdicts.keys().copied()).collect();
    notions.extend(traces.iter().filter_map(|t| t.primary.map(|p| p.notion)));
    notions.sort();
    notions.dedup();
    let n_stars = notions.into_iter().map(|n| (n, n_star(traces, n))).collect();
    (stability_counters(traces), n_stars)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub n: u64,
    pub error: f64,
}

/// Fraction of seeded i.i.d. runs where `notion` fails at each `n`.
pub fn estimate_error_rate(cfg: &DuelConfig, notion: Notion, trials: u64, n_grid: &[u64]) -> Result<Vec<RatePoint>> {
    if !matches!(cfg.adversary, AdversarySpec::Iid { .. }) {
        return Err(Error::config("adversary", "the rate harness needs an IID adversary"));
    }
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let horizon = n_grid.iter().copied().max().unwrap_or(0);
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let failures: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut trial = cfg.clone();
            trial.seed = derive_seed(cfg.seed, i);
            trial.horizon = horizon.max(1);
            trial.notions = vec![notion];
            trial.checkpoints = Some(vec![trial.horizon]);
            let mut duel = Duel::new(&trial)?;
            let mut fails = Vec::with_capacity(grid.len());
            let mut k = 0;
            for n in 1..=horizon {
                let t = duel.step()?;
                while k < grid.len() && grid[k] == n {
                    fails.push(!t.primary.expect("primary notion").holds);
                    k += 1;
                }
            }
            Ok(fails)
        })
        .collect::<Result<_>>()?;
    Ok(grid
        .iter()
        .enumerate()
        .map(|(k, &n)| RatePoint {
            n,
            error: failures.iter().filter(|f| f[k]).count() as f64 / trials as f64,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunMatrixConfig {
    pub collections: Vec<CollectionName>,
    pub generators: Vec<GeneratorKind>,
    pub adversaries: Vec<AdversarySpec>,
    #[serde(default)]
    pub notions: Vec<Notion>,
    #[serde(default)]
    pub generator_params: GeneratorParams,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub id: usize,
    pub config: DuelConfig,
    /// Why the cell cannot run on this collection, if it cannot.
    pub not_applicable: Option<String>,
}

impl RunMatrixConfig {
    /// Every grid cell, validated; inapplicable cells carry the reason.
    pub fn cells(&self) -> Result<Vec<MatrixCell>> {
        if self.horizon == 0 {
            return Err(Error::config("horizon", "must be at least 1"));
        }
        for (field, empty) in [
            ("collections", self.collections.is_empty()),
            ("generators", self.generators.is_empty()),
            ("adversaries", self.adversaries.is_empty()),
        ] {
            if empty {
                return Err(Error::config(field, "must not be empty"));
            }
        }
        let mut cells = Vec::new();
        for &collection in &self.collections {
            for &generator in &self.generators {
                for adversary in &self.adversaries {
                    let id = cells.len();
                    let mut cfg = DuelConfig::new(collection, generator, adversary.clone());
                    cfg.generator_params = self.generator_params;
                    cfg.horizon = self.horizon;
                    cfg.notions = self.notions.clone();
                    cfg.seed = derive_seed(self.seed, id as u64);
                    let not_applicable = cfg.validate().err().map(|e| e.to_string());
                    cells.push(MatrixCell {
                        id,
                        config: cfg,
                        not_applicable,
                    });
                }
            }
        }
        Ok(cells)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixResult {
    pub cell: MatrixCell,
    pub report: Option<RunReport>,
    pub error: Option<String>,
}

/// Runs applicable cells concurrently, each with its own derived seed.
pub fn run_matrix(cfg: &RunMatrixConfig) -> Result<Vec<(MatrixResult, Vec<StepTrace>)>> {
    let cells = cfg.cells()?;
    Ok(cells
        .into_par_iter()
        .map(|cell| {
            if cell.not_applicable.is_some() {
                return (
                    MatrixResult {
                        cell,
                        report: None,
                        error: None,
                    },
                    Vec::new(),
                );
            }
            match run_duel(&cell.config) {
                Ok((traces, report)) => (
                    MatrixResult {
                        cell,
                        report: Some(report),
                        error: None,
                    },
                    traces,
                ),
                Err(e) => (
                    MatrixResult {
                        cell,
                        report: None,
                        error: Some(e.to_string()),
                    },
                    Vec::new(),
                ),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extent {
    None,
    Finite,
    Infinite,
}

impl Extent {
    pub fn of(c: Cardinality) -> Extent {
        match c {
            Cardinality::Finite(0) => Extent::None,
            Cardinality::Finite(_) => Extent::Finite,
            Cardinality::Infinite => Extent::Infinite,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Extent::None => "none",
            Extent::Finite => "finite",
            Extent::Infinite => "infinite",
        }
    }

    pub const ALL: [Extent; 3] = [Extent::None, Extent::Finite, Extent::Infinite];
}

/// Notions whose definition places an output in a given cell of the
/// missing-elements × hallucination grid.
fn grid_notions(missing: Extent, hallucination: Extent) -> &'static str {
    match (missing, hallucination) {
        (Extent::None, Extent::None) => "exact, exhaustive, unambiguous",
        (Extent::None, Extent::Finite) => "exhaustive, unambiguous",
        (Extent::Finite, Extent::None) => "approximate, unambiguous",
        (Extent::Finite, Extent::Finite) => "unambiguous",
        (Extent::Infinite, Extent::None) => "infinite coverage",
        _ => "-",
    }
}

/// Places each run's final output in the missing × hallucination grid.
/// Missing elements are counted outside the seen set.
pub fn summary_table(rows: &[(String, &RunReport)]) -> String {
    let mut cells: BTreeMap<(Extent, Extent), Vec<String>> = BTreeMap::new();
    for (label, report) in rows {
        let Some(v) = report.final_verdicts.first() else { continue };
        let (m, h) = (v.check.missing_card, v.check.hallucination_card);
        cells.entry((Extent::of(m), Extent::of(h))).or_default().push(label.clone());
    }
    let mut out = String::new();
    out.push_str("| missing \\ hallucination | none | finite | infinite |\n");
    out.push_str("|---|---|---|---|\n");
    for m in Extent::ALL {
        out.push_str(&format!("| {} |", m.as_str()));
        for h in Extent::ALL {
            let runs = cells.get(&(m, h)).map(|v| v.join("; ")).unwrap_or_default();
            let notions = grid_notions(m, h);
            if runs.is_empty() {
                out.push_str(&format!(" {notions} |"));
            } else {
                out.push_str(&format!(" {notions}: {runs} |"));
            }
        }
        out.push('\n');
    }
    out
}
