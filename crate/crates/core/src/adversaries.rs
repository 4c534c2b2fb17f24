//! Enumeration strategies: honest, i.i.d., the phased lower-bound adversary,
//! and the adversary against stable infinite coverage.
//!
//! The adaptive adversaries read the opposing generator's exact output
//! before each emission.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::breadth::{evaluate, BreadthVerdict, Notion, View};
use crate::collections::{Collection, CollectionName};
use crate::conditions::{is_violation_point, violation_witness};
use crate::error::{Error, Result};
use crate::generators::{sample_with, Generator, Output};
use crate::sets::{Elem, FiniteSet, Fms};

pub const DEFAULT_BUDGET: u64 = 1_000;
pub const DEFAULT_RIVAL_BOUND: usize = 50;

fn default_repeat() -> u32 {
    1
}

/// Adversary selection as it appears in configs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE", deny_unknown_fields)]
pub enum AdversarySpec {
    Canonical {
        target: usize,
        /// Each element is emitted this many times in a row.
        #[serde(default = "default_repeat")]
        repeat: u32,
    },
    LbPhase {
        star: usize,
        predicate: Notion,
        #[serde(default)]
        budget: Option<u64>,
        #[serde(default)]
        rival_bound: Option<usize>,
    },
    StableCoverage {
        #[serde(default)]
        budget: Option<u64>,
    },
    Iid {
        target: usize,
    },
}

impl AdversarySpec {
    pub fn label(&self) -> &'static str {
        match self {
            AdversarySpec::Canonical { .. } => "CANONICAL",
            AdversarySpec::LbPhase { .. } => "LB_PHASE",
            AdversarySpec::StableCoverage { .. } => "STABLE_COVERAGE",
            AdversarySpec::Iid { .. } => "IID",
        }
    }
}

/// The generator as the adversary sees it.
#[derive(Debug, Clone, Copy)]
pub struct GenView<'a> {
    pub output: &'a Output,
    pub seen: &'a FiniteSet,
    pub firsts: &'a FiniteSet,
    pub step: u64,
}

impl<'a> GenView<'a> {
    pub fn of(g: &'a Generator) -> Self {
        GenView {
            output: g.output(),
            seen: g.seen(),
            firsts: g.firsts(),
            step: g.step_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subphase {
    A,
    B1,
    B2,
}

/// One phase of the lower-bound construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub phase: usize,
    pub witness: usize,
    pub start_step: u64,
    /// Step at which the predicate held for the witness language.
    pub exit_step: Option<u64>,
    pub via: Option<Subphase>,
    /// Last step of the phase.
    pub end_step: Option<u64>,
    pub skipped: u64,
    /// Verdicts on the exit-step output, against the witness and the star.
    pub witness_verdict: Option<BreadthVerdict>,
    pub star_verdict: Option<BreadthVerdict>,
    /// Step at which Subphase A ran past its budget.
    pub stalled_at: Option<u64>,
}

impl PhaseRecord {
    pub fn is_closed(&self) -> bool {
        self.end_step.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stall {
    pub budget: u64,
    pub step: u64,
    pub verdict: String,
    /// The language the stalled phase commits to.
    pub committed_target: usize,
}

impl Stall {
    pub fn to_error(&self) -> Error {
        Error::StalledPhase {
            budget: self.budget,
            verdict: self.verdict.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LbPhase {
    collection: Collection,
    star: usize,
    star_lang: Fms,
    predicate: Notion,
    budget: u64,
    rival_bound: usize,
    emitted: FiniteSet,
    emitted_count: u64,
    /// Last element of the star's enumeration visited.
    cursor: Elem,
    subphase: Subphase,
    witness: usize,
    witness_lang: Fms,
    skipped: FiniteSet,
    a_steps: u64,
    phases: Vec<PhaseRecord>,
    stall: Option<Stall>,
}

impl LbPhase {
    pub fn new(collection: Collection, star: usize, predicate: Notion, budget: u64, rival_bound: usize) -> Result<Self> {
        let kind = predicate.witness_kind().ok_or_else(|| {
            Error::config("predicate", format!("{predicate} is not a phased-adversary predicate"))
        })?;
        if !is_violation_point(&collection, star, kind) {
            return Err(Error::NotAViolationPoint {
                collection: collection.id().to_string(),
                star,
                kind: kind.as_str().to_string(),
            });
        }
        let star_lang = collection.language(star)?;
        let first = star_lang
            .first()
            .ok_or_else(|| Error::ContractViolation("star language is empty".into()))?;
        let witness = violation_witness(&collection, star, &FiniteSet::singleton(first), kind)?;
        let witness_lang = collection.language(witness)?;
        Ok(LbPhase {
            collection,
            star,
            star_lang,
            predicate,
            budget,
            rival_bound,
            emitted: FiniteSet::new(),
            emitted_count: 0,
            cursor: 0,
            subphase: Subphase::A,
            witness,
            witness_lang,
            skipped: FiniteSet::new(),
            a_steps: 0,
            phases: vec![PhaseRecord {
                phase: 1,
                witness,
                start_step: 1,
                exit_step: None,
                via: None,
                end_step: None,
                skipped: 0,
                witness_verdict: None,
                star_verdict: None,
                stalled_at: None,
            }],
            stall: None,
        })
    }

    pub fn phases(&self) -> &[PhaseRecord] {
        &self.phases
    }

    pub fn closed_phases(&self) -> usize {
        self.phases.iter().filter(|p| p.is_closed()).count()
    }

    pub fn subphase(&self) -> Subphase {
        self.subphase
    }

    pub fn witness(&self) -> usize {
        self.witness
    }

    pub fn stall(&self) -> Option<&Stall> {
        self.stall.as_ref()
    }

    pub fn emitted(&self) -> &FiniteSet {
        &self.emitted
    }

    /// The star unless the current phase has stalled.
    pub fn committed_target(&self) -> usize {
        let cur = self.current();
        if cur.stalled_at.is_some() && !cur.is_closed() {
            cur.witness
        } else {
            self.star
        }
    }

    fn current(&self) -> &PhaseRecord {
        self.phases.last().expect("at least one phase")
    }

    fn current_mut(&mut self) -> &mut PhaseRecord {
        self.phases.last_mut().expect("at least one phase")
    }

    /// Next element of the star's enumeration not yet emitted.
    fn advance_cursor(&mut self) -> Elem {
        loop {
            let x = self
                .star_lang
                .next_member_at_or_after(self.cursor + 1)
                .expect("star language is infinite");
            self.cursor = x;
            if !self.emitted.contains(x) {
                return x;
            }
        }
    }

    fn emit(&mut self, x: Elem) -> Elem {
        self.emitted.insert(x);
        self.emitted_count += 1;
        x
    }

    fn close_phase(&mut self) -> Result<()> {
        let step = self.emitted_count;
        self.current_mut().end_step = Some(step);
        let kind = self.predicate.witness_kind().expect("checked at construction");
        let next = violation_witness(&self.collection, self.star, &self.emitted, kind)?;
        if self.phases.iter().any(|p| p.witness == next) {
            return Err(Error::ContractViolation(format!("witness {next} repeated across phases")));
        }
        self.witness = next;
        self.witness_lang = self.collection.language(next)?;
        self.subphase = Subphase::A;
        self.skipped = FiniteSet::new();
        self.a_steps = 0;
        let phase = self.phases.len() + 1;
        self.phases.push(PhaseRecord {
            phase,
            witness: next,
            start_step: step + 1,
            exit_step: None,
            via: None,
            end_step: None,
            skipped: 0,
            witness_verdict: None,
            star_verdict: None,
            stalled_at: None,
        });
        Ok(())
    }

    pub fn next(&mut self, view: &GenView<'_>) -> Result<Elem> {
        if self.subphase == Subphase::A && self.a_steps > 0 {
            let out = view.output.effective();
            let v = View {
                output: &out,
                seen: view.seen,
                firsts: view.firsts,
            };
            let on_witness = evaluate(self.predicate, &v, &self.collection, self.witness, self.rival_bound)?;
            if on_witness.holds {
                let on_star = evaluate(self.predicate, &v, &self.collection, self.star, self.rival_bound)?;
                let step = self.emitted_count;
                let via = if self.skipped.is_empty() { Subphase::B2 } else { Subphase::B1 };
                let skipped = self.skipped.len();
                let rec = self.current_mut();
                rec.exit_step = Some(step);
                rec.via = Some(via);
                rec.skipped = skipped;
                rec.witness_verdict = Some(on_witness);
                rec.star_verdict = Some(on_star);
                self.subphase = via;
            } else if self.a_steps == self.budget {
                let stall = Stall {
                    budget: self.budget,
                    step: self.emitted_count,
                    verdict: format!(
                        "generator never achieved {} on language {} within budget",
                        self.predicate, self.witness
                    ),
                    committed_target: self.witness,
                };
                self.current_mut().stalled_at = Some(stall.step);
                self.stall = Some(stall);
            }
        }
        match self.subphase {
            Subphase::A => {
                let x = loop {
                    let x = self.advance_cursor();
                    if self.witness_lang.member(x) {
                        break x;
                    }
                    self.skipped.insert(x);
                };
                self.a_steps += 1;
                Ok(self.emit(x))
            }
            Subphase::B1 => {
                let x = self.skipped.min().expect("B.1 entered with skipped elements");
                self.skipped = self.skipped.difference(&FiniteSet::singleton(x));
                let x = self.emit(x);
                if self.skipped.is_empty() {
                    self.close_phase()?;
                }
                Ok(x)
            }
            Subphase::B2 => {
                let x = self.advance_cursor();
                let outside = !self.witness_lang.member(x);
                let x = self.emit(x);
                if outside {
                    self.close_phase()?;
                }
                Ok(x)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverageState {
    /// Emitting consecutive elements until the support is infinite.
    Seek,
    /// Holding back `n_hat` until the support changes and is infinite.
    Avoid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveragePhase {
    pub phase: usize,
    /// Step at which the support was first infinite.
    pub infinite_at: Option<u64>,
    pub n_hat: Option<Elem>,
    /// Step at which `n_hat` was finally emitted.
    pub closed_at: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct StableCoverage {
    budget: u64,
    state: CoverageState,
    /// Next consecutive element to emit.
    next: Elem,
    emitted_count: u64,
    reference: Option<Fms>,
    n_hat: Option<Elem>,
    state_steps: u64,
    phases: Vec<CoveragePhase>,
    stall: Option<Stall>,
}

impl StableCoverage {
    pub fn new(budget: u64) -> Self {
        StableCoverage {
            budget,
            state: CoverageState::Seek,
            next: 1,
            emitted_count: 0,
            reference: None,
            n_hat: None,
            state_steps: 0,
            phases: vec![CoveragePhase {
                phase: 1,
                infinite_at: None,
                n_hat: None,
                closed_at: None,
            }],
            stall: None,
        }
    }

    pub fn state(&self) -> CoverageState {
        self.state
    }

    pub fn phases(&self) -> &[CoveragePhase] {
        &self.phases
    }

    pub fn closed_phases(&self) -> usize {
        self.phases.iter().filter(|p| p.closed_at.is_some()).count()
    }

    pub fn stall(&self) -> Option<&Stall> {
        self.stall.as_ref()
    }

    /// `ℕ` (index 0) unless a phase stalled while holding back `n_hat`.
    pub fn committed_target(&self) -> usize {
        match &self.stall {
            Some(s) if self.state == CoverageState::Avoid => s.committed_target,
            _ => 0,
        }
    }

    fn consecutive(&mut self) -> Elem {
        if Some(self.next) == self.n_hat && self.state == CoverageState::Avoid {
            self.next += 1;
        }
        let x = self.next;
        self.next += 1;
        x
    }

    fn record_stall(&mut self, verdict: &str, committed_target: usize) {
        if self.stall.is_none() {
            self.stall = Some(Stall {
                budget: self.budget,
                step: self.emitted_count,
                verdict: verdict.to_string(),
                committed_target,
            });
        }
    }

    pub fn next(&mut self, view: &GenView<'_>) -> Result<Elem> {
        let out = view.output.effective();
        let infinite = view.output.is_defined() && !out.cardinality().is_finite();
        match self.state {
            CoverageState::Seek if self.emitted_count > 0 && infinite => {
                let top = self.next - 1;
                let n_hat = out.next_member_at_or_after(top + 1).expect("infinite support");
                let phase = self.phases.last_mut().expect("phase");
                phase.infinite_at = Some(self.emitted_count);
                phase.n_hat = Some(n_hat);
                self.reference = Some(out);
                self.n_hat = Some(n_hat);
                self.state = CoverageState::Avoid;
                self.state_steps = 0;
            }
            CoverageState::Seek => {
                if self.state_steps >= self.budget {
                    self.record_stall("support never infinite", 0);
                }
            }
            CoverageState::Avoid => {
                let n_hat = self.n_hat.expect("set on entry");
                let passed = self.next > n_hat + 1;
                if passed && infinite && Some(&out) != self.reference.as_ref() {
                    let phase = self.phases.last_mut().expect("phase");
                    self.emitted_count += 1;
                    phase.closed_at = Some(self.emitted_count);
                    let next_phase = self.phases.len() + 1;
                    self.phases.push(CoveragePhase {
                        phase: next_phase,
                        infinite_at: None,
                        n_hat: None,
                        closed_at: None,
                    });
                    self.state = CoverageState::Seek;
                    self.state_steps = 0;
                    self.n_hat = None;
                    self.reference = None;
                    return Ok(n_hat);
                }
                if self.state_steps >= self.budget {
                    self.record_stall("support never changed while containing n_hat", n_hat as usize);
                }
            }
        }
        self.state_steps += 1;
        self.emitted_count += 1;
        Ok(self.consecutive())
    }
}

#[derive(Debug, Clone)]
pub struct Canonical {
    target: usize,
    lang: Fms,
    repeat: u32,
    last: Elem,
    repeated: u32,
}

impl Canonical {
    pub fn new(c: &Collection, target: usize, repeat: u32) -> Result<Self> {
        if repeat == 0 {
            return Err(Error::config("repeat", "must be at least 1"));
        }
        Ok(Canonical {
            target,
            lang: c.language(target)?,
            repeat,
            last: 0,
            repeated: 0,
        })
    }

    pub fn next(&mut self) -> Elem {
        if self.repeated == 0 || self.repeated >= self.repeat {
            self.last = self
                .lang
                .next_member_at_or_after(self.last + 1)
                .expect("target language is infinite");
            self.repeated = 0;
        }
        self.repeated += 1;
        self.last
    }

    pub fn target(&self) -> usize {
        self.target
    }
}

#[derive(Debug, Clone)]
pub struct Iid {
    target: usize,
    lang: Fms,
    rng: ChaCha8Rng,
}

impl Iid {
    pub fn new(c: &Collection, target: usize, seed: u64) -> Result<Self> {
        Ok(Iid {
            target,
            lang: c.language(target)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn next(&mut self) -> Result<Elem> {
        sample_with(&self.lang, &mut self.rng)
    }

    pub fn target(&self) -> usize {
        self.target
    }
}

/// A running adversary of any kind.
#[derive(Debug, Clone)]
pub enum Adversary {
    Canonical(Canonical),
    LbPhase(Box<LbPhase>),
    StableCoverage(StableCoverage),
    Iid(Iid),
}

impl Adversary {
    pub fn new(spec: &AdversarySpec, c: &Collection, seed: u64) -> Result<Self> {
        Ok(match *spec {
            AdversarySpec::Canonical { target, repeat } => Adversary::Canonical(Canonical::new(c, target, repeat)?),
            AdversarySpec::LbPhase {
                star,
                predicate,
                budget,
                rival_bound,
            } => Adversary::LbPhase(Box::new(LbPhase::new(
                c.clone(),
                star,
                predicate,
                budget.unwrap_or(DEFAULT_BUDGET),
                rival_bound.unwrap_or(DEFAULT_RIVAL_BOUND),
            )?)),
            AdversarySpec::StableCoverage { budget } => {
                // Its committed targets are the languages `ℕ \ {n_hat}`.
                if c.name() != CollectionName::SingleRemoval {
                    return Err(Error::WrongCollection {
                        generator: "STABLE_COVERAGE adversary".to_string(),
                        expected: CollectionName::SingleRemoval.as_str().to_string(),
                        found: c.id().to_string(),
                    });
                }
                Adversary::StableCoverage(StableCoverage::new(budget.unwrap_or(DEFAULT_BUDGET)))
            }
            AdversarySpec::Iid { target } => Adversary::Iid(Iid::new(c, target, seed)?),
        })
    }

    pub fn next(&mut self, view: &GenView<'_>) -> Result<Elem> {
        match self {
            Adversary::Canonical(a) => Ok(a.next()),
            Adversary::LbPhase(a) => a.next(view),
            Adversary::StableCoverage(a) => a.next(view),
            Adversary::Iid(a) => a.next(),
        }
    }

    /// Index of the language the enumeration is committed to so far.
    pub fn committed_target(&self) -> usize {
        match self {
            Adversary::Canonical(a) => a.target(),
            Adversary::LbPhase(a) => a.committed_target(),
            Adversary::StableCoverage(a) => a.committed_target(),
            Adversary::Iid(a) => a.target(),
        }
    }

    pub fn stall(&self) -> Option<&Stall> {
        match self {
            Adversary::LbPhase(a) => a.stall(),
            Adversary::StableCoverage(a) => a.stall(),
            _ => None,
        }
    }

    /// Short phase tag for traces.
    pub fn phase_tag(&self) -> Option<String> {
        match self {
            Adversary::LbPhase(a) => Some(format!("{}:{:?}", a.phases().len(), a.subphase())),
            Adversary::StableCoverage(a) => Some(format!("{}:{:?}", a.phases().len(), a.state())),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collections::CollectionName;
    use crate::generators::{GeneratorKind, GeneratorParams, SupportDescriptor};

    fn sr() -> Collection {
        Collection::builtin(CollectionName::SingleRemoval)
    }

    #[test]
    fn canonical_examples() {
        let mut a = Canonical::new(&sr(), 5, 1).unwrap();
        let xs: Vec<Elem> = (0..6).map(|_| a.next()).collect();
        assert_eq!(xs, vec![1, 2, 3, 4, 6, 7]);
        let mut a = Canonical::new(&sr(), 0, 2).unwrap();
        let xs: Vec<Elem> = (0..6).map(|_| a.next()).collect();
        assert_eq!(xs, vec![1, 1, 2, 2, 3, 3]);
    }

    #[test]
    fn iid_stays_in_target_and_replays() {
        let c = Collection::builtin(CollectionName::PrimeMultiples);
        let mut a = Iid::new(&c, 2, 9).unwrap();
        let mut b = Iid::new(&c, 2, 9).unwrap();
        for _ in 0..500 {
            let x = a.next().unwrap();
            assert_eq!(x % 3, 0);
            assert_eq!(x, b.next().unwrap());
        }
        let mut a = Iid::new(&sr(), 0, 1).unwrap();
        let ones = (0..10_000).filter(|_| a.next().unwrap() == 1).count();
        assert!((ones as f64 / 10_000.0 - 0.5).abs() < 0.02);
    }

    fn duel_lb(c: Collection, star: usize, pred: Notion, kind: GeneratorKind, steps: usize) -> (LbPhase, Vec<Elem>) {
        let mut adv = LbPhase::new(c.clone(), star, pred, DEFAULT_BUDGET, DEFAULT_RIVAL_BOUND).unwrap();
        let mut g = Generator::new(kind, c, GeneratorParams::default()).unwrap();
        let mut xs = Vec::new();
        for _ in 0..steps {
            let x = adv.next(&GenView::of(&g)).unwrap();
            g.step(x).unwrap();
            xs.push(x);
        }
        (adv, xs)
    }

    #[test]
    fn lb_phase_against_km_on_single_removal() {
        let (adv, xs) = duel_lb(sr(), 0, Notion::Exact, GeneratorKind::KmSubset, 300);
        // Phase 1 targets the language missing 2: emit 1, skip 2, emit 3 and
        // 4 until the generator covers it, then re-emit 2.
        assert_eq!(&xs[..4], &[1, 3, 4, 2]);
        assert_eq!(adv.phases()[0].witness, 2);
        assert!(adv.closed_phases() >= 5);
        let mut witnesses = Vec::new();
        for p in adv.phases().iter().filter(|p| p.is_closed()) {
            assert!(p.witness_verdict.unwrap().holds);
            assert!(!p.star_verdict.unwrap().holds);
            assert!(!witnesses.contains(&p.witness));
            witnesses.push(p.witness);
        }
    }

    #[test]
    fn lb_phase_boundary_prefix_leaves_the_witness() {
        let c = sr();
        let (adv, xs) = duel_lb(c.clone(), 0, Notion::Exact, GeneratorKind::KmSubset, 200);
        for p in adv.phases().iter().filter(|p| p.is_closed()) {
            let prefix: FiniteSet = xs[..p.end_step.unwrap() as usize].iter().copied().collect();
            assert!(!c.language(p.witness).unwrap().contains_all(&prefix));
        }
    }

    #[test]
    fn lb_phase_on_suffixes_uses_infinitely_smaller_witnesses() {
        let c = Collection::builtin(CollectionName::Suffixes);
        let (adv, _) = duel_lb(c.clone(), 0, Notion::Approx, GeneratorKind::TelltaleExhaustive, 300);
        assert!(adv.closed_phases() >= 3);
        for p in adv.phases() {
            let miss = c.language(0).unwrap().diff_card(&c.language(p.witness).unwrap()).unwrap();
            assert!(!miss.is_finite());
        }
        for p in adv.phases().iter().filter(|p| p.is_closed()) {
            assert!(!p.star_verdict.unwrap().evidence.missing_card.is_finite());
        }
    }

    #[test]
    fn lb_phase_rejects_non_violation_points() {
        let c = Collection::builtin(CollectionName::PrimeMultiples);
        assert!(matches!(
            LbPhase::new(c, 1, Notion::Exact, 10, 10),
            Err(Error::NotAViolationPoint { .. })
        ));
        assert!(matches!(
            LbPhase::new(sr(), 0, Notion::InfiniteCoverage, 10, 10),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn lb_phase_stall_commits_to_the_witness() {
        // A generator that never outputs anything defined never covers a witness.
        let c = sr();
        let mut adv = LbPhase::new(c, 0, Notion::Exact, 20, 10).unwrap();
        let out = Output::Distribution(SupportDescriptor::Undefined);
        let mut seen = FiniteSet::new();
        for _ in 0..50 {
            let view = GenView {
                output: &out,
                seen: &seen,
                firsts: &FiniteSet::new(),
                step: 0,
            };
            let x = adv.next(&view).unwrap();
            seen.insert(x);
        }
        let stall = adv.stall().unwrap();
        assert_eq!(stall.committed_target, 2);
        assert_eq!(adv.committed_target(), 2);
        assert!(!seen.contains(2));
    }

    fn run_coverage(outputs: impl Fn(u64) -> Output, steps: u64, budget: u64) -> (StableCoverage, Vec<Elem>) {
        let mut adv = StableCoverage::new(budget);
        let mut seen = FiniteSet::new();
        let mut xs = Vec::new();
        for n in 0..steps {
            let out = outputs(n);
            let firsts = FiniteSet::new();
            let view = GenView {
                output: &out,
                seen: &seen,
                firsts: &firsts,
                step: n,
            };
            let x = adv.next(&view).unwrap();
            seen.insert(x);
            xs.push(x);
        }
        (adv, xs)
    }

    #[test]
    fn stable_coverage_finite_support_stalls() {
        let finite = |_| Output::Distribution(SupportDescriptor::Fms(Fms::finite(FiniteSet::singleton(1))));
        let (adv, xs) = run_coverage(finite, 100, 30);
        assert_eq!(xs[..5], [1, 2, 3, 4, 5]);
        assert_eq!(adv.stall().unwrap().verdict, "support never infinite");
        assert_eq!(adv.committed_target(), 0);
    }

    #[test]
    fn stable_coverage_constant_infinite_support_stalls_on_n_hat() {
        let fixed = |_| Output::Distribution(SupportDescriptor::Fms(Fms::full().without(&FiniteSet::singleton(1))));
        let (adv, xs) = run_coverage(fixed, 100, 30);
        // Support is infinite after the first step; 2 is its least element above 1.
        assert_eq!(xs[..4], [1, 3, 4, 5]);
        assert!(!xs.contains(&2));
        assert_eq!(adv.stall().unwrap().verdict, "support never changed while containing n_hat");
        assert_eq!(adv.committed_target(), 2);
    }

    #[test]
    fn stable_coverage_counts_changes_of_a_moving_support() {
        let c = sr();
        let mut g = Generator::new(GeneratorKind::Telltale, c, GeneratorParams::default()).unwrap();
        let mut adv = StableCoverage::new(100);
        let mut seen = FiniteSet::new();
        for _ in 0..200 {
            let x = adv.next(&GenView::of(&g)).unwrap();
            g.step(x).unwrap();
            seen.insert(x);
        }
        assert!(adv.closed_phases() > 20);
        assert!(adv.stall().is_none());
        // Every held-back element is eventually emitted.
        for p in adv.phases().iter().filter(|p| p.closed_at.is_some()) {
            assert!(seen.contains(p.n_hat.unwrap()));
        }
    }
}
