//! Generators as step functions over an input stream.
//!
//! Every generator reports its output as an exact descriptor, so membership
//! in its support is decidable and the adversaries can inspect it. Indices
//! are 0-based: at step `t` the version space covers indices `< t`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::collections::{Capability, Collection, CollectionName, SeenSet, TellTaleKind};
use crate::error::{Error, Result};
use crate::sets::{Elem, FiniteSet, Fms};

/// Element emitted when an algorithm may output anything.
pub const ARBITRARY_ELEMENT: Elem = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GeneratorKind {
    KmSubset,
    Telltale,
    ExhaustiveFn,
    TelltaleExhaustive,
    ClosureStable,
    SuffixIncreasing,
    IdentifierExact,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 7] = [
        GeneratorKind::KmSubset,
        GeneratorKind::Telltale,
        GeneratorKind::ExhaustiveFn,
        GeneratorKind::TelltaleExhaustive,
        GeneratorKind::ClosureStable,
        GeneratorKind::SuffixIncreasing,
        GeneratorKind::IdentifierExact,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorKind::KmSubset => "KM_SUBSET",
            GeneratorKind::Telltale => "TELLTALE",
            GeneratorKind::ExhaustiveFn => "EXHAUSTIVE_FN",
            GeneratorKind::TelltaleExhaustive => "TELLTALE_EXHAUSTIVE",
            GeneratorKind::ClosureStable => "CLOSURE_STABLE",
            GeneratorKind::SuffixIncreasing => "SUFFIX_INCREASING",
            GeneratorKind::IdentifierExact => "IDENTIFIER_EXACT",
        }
    }

    pub fn required_capabilities(&self) -> &'static [Capability] {
        match self {
            GeneratorKind::KmSubset => &[Capability::Subset],
            GeneratorKind::ExhaustiveFn => &[Capability::Subset, Capability::FiniteDifference],
            GeneratorKind::Telltale | GeneratorKind::TelltaleExhaustive => &[Capability::TelltaleWeak],
            GeneratorKind::ClosureStable => &[Capability::Vsi],
            GeneratorKind::SuffixIncreasing => &[],
            GeneratorKind::IdentifierExact => &[Capability::TelltaleStrong],
        }
    }

    /// Whether the output is an enumeration rather than a distribution.
    pub fn enumerates(&self) -> bool {
        matches!(self, GeneratorKind::ExhaustiveFn | GeneratorKind::TelltaleExhaustive)
    }

    /// Checks that `c` can host this generator.
    pub fn validate(&self, c: &Collection) -> Result<()> {
        for &cap in self.required_capabilities() {
            c.require(cap)?;
        }
        if *self == GeneratorKind::SuffixIncreasing && c.name() != CollectionName::Suffixes {
            return Err(Error::WrongCollection {
                generator: self.as_str().to_string(),
                expected: CollectionName::Suffixes.as_str().to_string(),
                found: c.id().to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::config("generator", format!("unknown generator `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    /// Closure dimension handed to `CLOSURE_STABLE`.
    #[serde(default)]
    pub closure_dimension: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "support", rename_all = "snake_case")]
pub enum SupportDescriptor {
    Fms(Fms),
    /// The algorithm may output anything; it emits `ARBITRARY_ELEMENT`.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationOutput {
    /// Emitted in canonical domain order.
    pub stream: Fms,
    pub first: Option<Elem>,
    /// Set when the algorithm may output anything.
    pub arbitrary: bool,
}

impl EnumerationOutput {
    fn of(stream: Fms) -> Self {
        let first = stream.first();
        EnumerationOutput {
            stream,
            first,
            arbitrary: false,
        }
    }

    fn arbitrary() -> Self {
        EnumerationOutput {
            stream: Fms::finite(FiniteSet::singleton(ARBITRARY_ELEMENT)),
            first: Some(ARBITRARY_ELEMENT),
            arbitrary: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Distribution(SupportDescriptor),
    Enumeration(EnumerationOutput),
}

impl Output {
    /// The set the generator actually draws from or enumerates. Undefined
    /// supports collapse to the arbitrary element.
    pub fn effective(&self) -> Fms {
        match self {
            Output::Distribution(SupportDescriptor::Fms(s)) => s.clone(),
            Output::Distribution(SupportDescriptor::Undefined) => Fms::finite(FiniteSet::singleton(ARBITRARY_ELEMENT)),
            Output::Enumeration(e) => e.stream.clone(),
        }
    }

    pub fn is_defined(&self) -> bool {
        match self {
            Output::Distribution(d) => matches!(d, SupportDescriptor::Fms(_)),
            Output::Enumeration(e) => !e.arbitrary,
        }
    }

    /// Short trace form: the set summary, or `undefined`.
    pub fn summary(&self) -> String {
        match self {
            Output::Distribution(SupportDescriptor::Fms(s)) => s.summary(),
            Output::Distribution(SupportDescriptor::Undefined) => "undefined".to_string(),
            Output::Enumeration(e) if e.arbitrary => "arbitrary".to_string(),
            Output::Enumeration(e) => e.stream.summary(),
        }
    }

    pub fn first(&self) -> Option<Elem> {
        match self {
            Output::Enumeration(e) => e.first,
            _ => self.effective().first(),
        }
    }
}

/// Exact view of a defined support.
pub fn introspect(d: &SupportDescriptor) -> Result<&Fms> {
    match d {
        SupportDescriptor::Fms(s) => Ok(s),
        SupportDescriptor::Undefined => Err(Error::UndefinedSupport),
    }
}

/// Draws the `k`-th element of `support` with `k - 1` geometric(1/2).
/// Finite supports redraw until `k` fits.
pub fn sample_with<R: Rng + ?Sized>(support: &Fms, rng: &mut R) -> Result<Elem> {
    let size = support.cardinality().finite();
    if size == Some(0) {
        return Err(Error::EmptySupport);
    }
    let geo = Geometric::new(0.5).expect("valid parameter");
    loop {
        let k = 1 + geo.sample(rng);
        if size.is_none_or(|n| k <= n) {
            return Ok(support.nth(k).expect("k within support"));
        }
    }
}

pub fn sample(d: &SupportDescriptor, seed: u64) -> Result<Elem> {
    sample_with(introspect(d)?, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A generator instance: state plus the latest output.
#[derive(Debug, Clone)]
pub struct Generator {
    kind: GeneratorKind,
    collection: Collection,
    params: GeneratorParams,
    seen: SeenSet,
    step: u64,
    /// Index behind the current output (critical pick, `g_n`, `i(t)`, or guess).
    index: Option<usize>,
    /// Prefix counter for enumerating generators.
    counter: u64,
    frozen: Option<Fms>,
    firsts: FiniteSet,
    output: Output,
}

impl Generator {
    pub fn new(kind: GeneratorKind, collection: Collection, params: GeneratorParams) -> Result<Self> {
        kind.validate(&collection)?;
        if kind == GeneratorKind::ClosureStable && params.closure_dimension.is_none() {
            return Err(Error::config("closure_dimension", "CLOSURE_STABLE needs the closure dimension"));
        }
        let output = if kind.enumerates() {
            Output::Enumeration(EnumerationOutput::arbitrary())
        } else {
            Output::Distribution(SupportDescriptor::Undefined)
        };
        Ok(Generator {
            kind,
            collection,
            params,
            seen: SeenSet::new(),
            step: 0,
            index: None,
            counter: 0,
            frozen: None,
            firsts: FiniteSet::new(),
            output,
        })
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn collection(&self) -> &Collection {
        &self.collection
    }

    pub fn seen(&self) -> &FiniteSet {
        self.seen.set()
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn index(&self) -> Option<usize> {
        self.index
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen.is_some()
    }

    /// Every first element output so far.
    pub fn firsts(&self) -> &FiniteSet {
        &self.firsts
    }

    pub fn output(&self) -> &Output {
        &self.output
    }

    /// Feeds one input and returns the new output.
    pub fn step(&mut self, x: Elem) -> Result<&Output> {
        self.seen.insert(x);
        self.step += 1;
        self.output = match self.kind {
            GeneratorKind::KmSubset => self.km()?,
            GeneratorKind::Telltale => self.telltale()?,
            GeneratorKind::ExhaustiveFn => self.exhaustive_fn()?,
            GeneratorKind::TelltaleExhaustive => self.telltale_exhaustive()?,
            GeneratorKind::ClosureStable => self.closure_stable()?,
            GeneratorKind::SuffixIncreasing => self.suffix_increasing(),
            GeneratorKind::IdentifierExact => self.identifier_exact()?,
        };
        if let Some(f) = self.output.first() {
            self.firsts.insert(f);
        }
        Ok(&self.output)
    }

    /// Draws one element from the current output.
    pub fn emit<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Elem> {
        match &self.output {
            Output::Distribution(SupportDescriptor::Undefined) => Ok(ARBITRARY_ELEMENT),
            Output::Distribution(SupportDescriptor::Fms(s)) => sample_with(s, rng),
            Output::Enumeration(e) => e.first.ok_or(Error::EmptySupport),
        }
    }

    fn below(&self) -> usize {
        self.step as usize
    }

    /// Critical languages among consistent indices `< t`, ascending. A
    /// member is critical when it is a subset of every earlier member.
    fn critical_list(&self) -> Result<Vec<usize>> {
        let c = &self.collection;
        let mut version_space: Vec<usize> = Vec::new();
        let mut critical = Vec::new();
        let mut from = 0;
        while let Some(i) = c.next_consistent(from, self.below(), &self.seen) {
            let mut ok = true;
            for &j in version_space.iter().rev() {
                if !c.subset(i, j)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                critical.push(i);
            }
            version_space.push(i);
            from = i + 1;
        }
        Ok(critical)
    }

    fn km(&mut self) -> Result<Output> {
        let critical = self.critical_list()?;
        self.index = critical.last().copied();
        Ok(Output::Distribution(match self.index {
            None => SupportDescriptor::Undefined,
            Some(i) => SupportDescriptor::Fms(self.collection.language(i)?.without(self.seen.set())),
        }))
    }

    /// Smallest consistent index in `0..bound` whose first `n` tell-tale
    /// elements are all seen. Languages without a tell-tale are skipped.
    fn telltale_index(&self, kind: TellTaleKind, bound: usize) -> Result<Option<usize>> {
        let c = &self.collection;
        let n = self.step as usize;
        let mut from = 0;
        while let Some(i) = c.next_consistent(from, bound, &self.seen) {
            match c.telltale(i, kind, n) {
                Ok(t) if t.is_subset(self.seen.set()) => return Ok(Some(i)),
                Ok(_) | Err(Error::NoTellTale { .. }) => {}
                Err(e) => return Err(e),
            }
            from = i + 1;
        }
        Ok(None)
    }

    fn telltale(&mut self) -> Result<Output> {
        self.index = self.telltale_index(TellTaleKind::Weak, self.below())?;
        Ok(Output::Distribution(match self.index {
            None => SupportDescriptor::Undefined,
            Some(g) => {
                let prefix = FiniteSet::range(1, self.step);
                SupportDescriptor::Fms(self.collection.language(g)?.without(&self.seen.set().union(&prefix)))
            }
        }))
    }

    /// Resets the prefix counter on an index change, otherwise advances it.
    fn advance_counter(&mut self, next: Option<usize>) {
        if next != self.index {
            self.counter = 0;
        } else {
            self.counter += 1;
        }
        self.index = next;
    }

    /// `L_i` minus the sentinel and the first `counter` domain elements.
    fn trimmed(&self, i: usize) -> Result<Output> {
        let lang = self.collection.language(i)?;
        let stream = if self.counter == 0 {
            lang
        } else {
            lang.without(&FiniteSet::range(1, self.counter))
        };
        Ok(Output::Enumeration(EnumerationOutput::of(stream)))
    }

    fn exhaustive_fn(&mut self) -> Result<Output> {
        let c = &self.collection;
        let critical = self.critical_list()?;
        let pick = match critical.last() {
            None => None,
            Some(&last) => {
                let mut pick = None;
                for &i in &critical {
                    if i == last || c.finite_difference(last, i)? {
                        pick = Some(i);
                        break;
                    }
                }
                pick
            }
        };
        self.advance_counter(pick);
        match pick {
            None => Ok(Output::Enumeration(EnumerationOutput::arbitrary())),
            Some(i) => self.trimmed(i),
        }
    }

    fn telltale_exhaustive(&mut self) -> Result<Output> {
        let g = self.telltale_index(TellTaleKind::Weak, self.below())?;
        self.advance_counter(g);
        match g {
            None => Ok(Output::Enumeration(EnumerationOutput::arbitrary())),
            Some(i) => self.trimmed(i),
        }
    }

    fn closure_stable(&mut self) -> Result<Output> {
        if self.frozen.is_none() {
            let d = self.params.closure_dimension.expect("checked at construction");
            if self.seen.len() as usize > d {
                self.frozen = Some(self.collection.vsi_set(self.seen.set())?);
            }
        }
        Ok(Output::Distribution(match &self.frozen {
            None => SupportDescriptor::Undefined,
            Some(s) => SupportDescriptor::Fms(s.clone()),
        }))
    }

    fn suffix_increasing(&mut self) -> Output {
        Output::Distribution(match self.seen.min_value() {
            None => SupportDescriptor::Undefined,
            Some(m) => SupportDescriptor::Fms(Fms::suffix(m)),
        })
    }

    fn identifier_exact(&mut self) -> Result<Output> {
        self.index = self.telltale_index(TellTaleKind::Strong, self.below() + 1)?;
        Ok(Output::Distribution(match self.index {
            None => SupportDescriptor::Undefined,
            Some(i) => SupportDescriptor::Fms(self.collection.language(i)?.without(self.seen.set())),
        }))
    }
}
