//! Bounded checkers for the tell-tale conditions, the closure dimension, and
//! the witness oracle the phased adversary consumes.
//!
//! A `Verified` verdict means every index up to `max_index` has a tell-tale
//! that survives an exact re-check against every index up to `max_index` and
//! the collection's closed-form proper-subset search. A `Refuted` verdict is
//! a chain of `chain_depth` successful witness steps: evidence, not proof.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collections::{Collection, CollectionName, SeenSet, TellTaleKind};
use crate::error::{Error, Result};
use crate::sets::{Elem, FiniteSet, Fms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_index: usize,
    pub max_telltale_size: usize,
    pub domain_horizon: usize,
    pub chain_depth: usize,
}

impl SearchBounds {
    pub fn new(max_index: usize, max_telltale_size: usize, domain_horizon: usize, chain_depth: usize) -> Result<Self> {
        let b = SearchBounds {
            max_index,
            max_telltale_size,
            domain_horizon,
            chain_depth,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("max_index", self.max_index),
            ("max_telltale_size", self.max_telltale_size),
            ("domain_horizon", self.domain_horizon),
            ("chain_depth", self.chain_depth),
        ] {
            if v == 0 {
                return Err(Error::config(field, "must be at least 1"));
            }
        }
        Ok(())
    }
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_index: 25,
            max_telltale_size: 3,
            domain_horizon: 100,
            chain_depth: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TellTaleSource {
    Oracle,
    Searched,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TellTaleEntry {
    pub index: usize,
    pub telltale: FiniteSet,
    pub source: TellTaleSource,
}

/// One step of a refutation: `T ⊆ L_j ⊊ L_star`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub t: FiniteSet,
    pub l_t: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConditionCertificate {
    Verified {
        telltales: Vec<TellTaleEntry>,
    },
    Refuted {
        star_index: usize,
        witness_chain: Vec<ChainLink>,
    },
    /// Neither outcome could be established within the bounds.
    Unknown {
        unresolved: Vec<usize>,
    },
}

impl ConditionCertificate {
    pub fn label(&self) -> &'static str {
        match self {
            ConditionCertificate::Verified { .. } => "verified",
            ConditionCertificate::Refuted { .. } => "refuted within bounds",
            ConditionCertificate::Unknown { .. } => "unknown",
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, ConditionCertificate::Verified { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, ConditionCertificate::Refuted { .. })
    }
}

/// Does `L_j` break the tell-tale clause for `L_i` given `T ⊆ L_j`?
fn breaks_clause(li: &Fms, lj: &Fms, kind: TellTaleKind) -> Result<bool> {
    let r = lj.relate(li)?;
    let proper = r.subset && !r.equal;
    Ok(proper
        && match kind {
            TellTaleKind::Strong => true,
            TellTaleKind::Weak => !r.rev_diff_card.is_finite(),
        })
}

/// Smallest index `j ≤ max_index` with `T ⊆ L_j` that breaks the clause for
/// language `i`.
pub fn bounded_violator(c: &Collection, i: usize, t: &FiniteSet, kind: TellTaleKind, max_index: usize) -> Result<Option<usize>> {
    let li = c.language(i)?;
    for j in c.indices_below(max_index + 1) {
        if j == i {
            continue;
        }
        let lj = c.language(j)?;
        if lj.contains_all(t) && breaks_clause(&li, &lj, kind)? {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// Exact acceptance test for a candidate tell-tale of language `i`.
pub fn accepts(c: &Collection, i: usize, t: &FiniteSet, kind: TellTaleKind, max_index: usize) -> Result<bool> {
    if !c.language(i)?.contains_all(t) {
        return Ok(false);
    }
    if c.proper_subset_witness(i, t, kind).is_some() {
        return Ok(false);
    }
    Ok(bounded_violator(c, i, t, kind, max_index)?.is_none())
}

/// Does `link` independently satisfy the witness conditions against `star`?
pub fn link_is_sound(c: &Collection, star: usize, link: &ChainLink, kind: TellTaleKind) -> Result<bool> {
    let ls = c.language(star)?;
    let lt = c.language(link.l_t)?;
    Ok(ls.contains_all(&link.t) && lt.contains_all(&link.t) && breaks_clause(&ls, &lt, kind)?)
}

/// Visits every `k`-subset of `items` in lexicographic order until `visit`
/// returns true. Returns whether it stopped early.
fn any_combination(items: &[Elem], k: usize, visit: &mut impl FnMut(&[Elem]) -> bool) -> bool {
    fn go(items: &[Elem], k: usize, start: usize, buf: &mut Vec<Elem>, visit: &mut impl FnMut(&[Elem]) -> bool) -> bool {
        if buf.len() == k {
            return visit(buf);
        }
        let need = k - buf.len();
        for p in start..=items.len().saturating_sub(need) {
            if p >= items.len() {
                break;
            }
            buf.push(items[p]);
            if go(items, k, p + 1, buf, visit) {
                return true;
            }
            buf.pop();
        }
        false
    }
    if k > items.len() {
        return false;
    }
    go(items, k, 0, &mut Vec::with_capacity(k), visit)
}

enum IndexOutcome {
    Found(TellTaleEntry),
    Refuted(Vec<ChainLink>),
    Unknown,
}

fn search_index(c: &Collection, i: usize, kind: TellTaleKind, b: &SearchBounds) -> Result<IndexOutcome> {
    if let Ok(t) = c.telltale(i, kind, b.max_telltale_size + 1) {
        if t.len() as usize <= b.max_telltale_size && accepts(c, i, &t, kind, b.max_index)? {
            return Ok(IndexOutcome::Found(TellTaleEntry {
                index: i,
                telltale: t,
                source: TellTaleSource::Oracle,
            }));
        }
    }
    let li = c.language(i)?;
    let pool = li.enumerate(b.domain_horizon);
    let mut found: Option<FiniteSet> = None;
    let mut err: Option<Error> = None;
    for size in 0..=b.max_telltale_size {
        any_combination(&pool, size, &mut |xs| {
            let t: FiniteSet = xs.iter().copied().collect();
            match accepts(c, i, &t, kind, b.max_index) {
                Ok(true) => {
                    found = Some(t);
                    true
                }
                Ok(false) => false,
                Err(e) => {
                    err = Some(e);
                    true
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if let Some(t) = found {
            return Ok(IndexOutcome::Found(TellTaleEntry {
                index: i,
                telltale: t,
                source: TellTaleSource::Searched,
            }));
        }
    }
    let chain = refutation_chain(c, i, kind, b)?;
    Ok(if chain.len() == b.chain_depth {
        IndexOutcome::Refuted(chain)
    } else {
        IndexOutcome::Unknown
    })
}

/// Grows `T` from the first element of `L_star`, each time adding the first
/// element of `L_star` the previous witness misses. Stops early when no
/// witness exists among the first `max_index + 1` languages.
fn refutation_chain(c: &Collection, star: usize, kind: TellTaleKind, b: &SearchBounds) -> Result<Vec<ChainLink>> {
    let ls = c.language(star)?;
    let Some(first) = ls.first() else {
        return Ok(Vec::new());
    };
    let mut t = FiniteSet::singleton(first);
    let mut chain = Vec::new();
    while chain.len() < b.chain_depth {
        let mut witness = None;
        for j in c.indices_below(b.max_index + 1) {
            let lj = c.language(j)?;
            if j != star && lj.contains_all(&t) && breaks_clause(&ls, &lj, kind)? {
                witness = Some((j, lj));
                break;
            }
        }
        let Some((j, lj)) = witness else { break };
        chain.push(ChainLink { t: t.clone(), l_t: j });
        let Some(next) = ls.iter().find(|&x| !lj.member(x)) else { break };
        t.insert(next);
    }
    Ok(chain)
}

fn check(c: &Collection, b: &SearchBounds, kind: TellTaleKind) -> Result<ConditionCertificate> {
    b.validate()?;
    let indices: Vec<usize> = c.indices_below(b.max_index + 1).collect();
    let outcomes: Vec<(usize, IndexOutcome)> = indices
        .par_iter()
        .map(|&i| search_index(c, i, kind, b).map(|o| (i, o)))
        .collect::<Result<_>>()?;
    let mut telltales = Vec::new();
    let mut unresolved = Vec::new();
    for (i, o) in outcomes {
        match o {
            IndexOutcome::Found(e) => telltales.push(e),
            IndexOutcome::Refuted(chain) => {
                return Ok(ConditionCertificate::Refuted {
                    star_index: i,
                    witness_chain: chain,
                })
            }
            IndexOutcome::Unknown => unresolved.push(i),
        }
    }
    Ok(if unresolved.is_empty() {
        ConditionCertificate::Verified { telltales }
    } else {
        ConditionCertificate::Unknown { unresolved }
    })
}

/// Bounded check of the strong tell-tale condition.
pub fn check_angluin(c: &Collection, b: &SearchBounds) -> Result<ConditionCertificate> {
    check(c, b, TellTaleKind::Strong)
}

/// Bounded check of the weak tell-tale condition.
pub fn check_weak_angluin(c: &Collection, b: &SearchBounds) -> Result<ConditionCertificate> {
    check(c, b, TellTaleKind::Weak)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum DimensionValue {
    Exactly(usize),
    /// The largest size searched still produced a finite intersection.
    AtLeast(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureDimension {
    pub value: DimensionValue,
    pub witness: FiniteSet,
    /// Set when no tuple at any searched size gave a finite intersection.
    pub no_finite_tuple: bool,
}

/// Largest tuple size (up to `max_telltale_size`) of distinct elements drawn
/// from the first `domain_horizon` ids whose version space over indices
/// `0..=max_index` is nonempty and has a finite intersection.
pub fn closure_dimension(c: &Collection, b: &SearchBounds) -> Result<ClosureDimension> {
    b.validate()?;
    let pool: Vec<Elem> = (1..=b.domain_horizon as Elem).collect();
    let indices: Vec<usize> = c.indices_below(b.max_index + 1).collect();
    let languages: Vec<Fms> = indices.iter().map(|&i| c.language(i)).collect::<Result<_>>()?;
    // Finiteness depends only on which languages are consistent.
    let mut memo: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut err: Option<Error> = None;
    let mut best: Option<(usize, FiniteSet)> = None;
    for size in 1..=b.max_telltale_size {
        let mut hit = None;
        any_combination(&pool, size, &mut |xs| {
            let seen: SeenSet = xs.iter().copied().collect();
            let consistent: Vec<usize> = (0..indices.len()).filter(|&k| c.consistent(indices[k], &seen)).collect();
            if consistent.is_empty() {
                return false;
            }
            let finite = match memo.get(&consistent) {
                Some(&f) => f,
                None => {
                    let f = finite_intersection(&languages, &consistent, b.domain_horizon);
                    match f {
                        Ok(f) => {
                            memo.insert(consistent, f);
                            f
                        }
                        Err(e) => {
                            err = Some(e);
                            return true;
                        }
                    }
                }
            };
            if finite {
                hit = Some(xs.iter().copied().collect::<FiniteSet>());
            }
            finite
        });
        if let Some(e) = err {
            return Err(e);
        }
        if let Some(w) = hit {
            best = Some((size, w));
        }
    }
    Ok(match best {
        None => ClosureDimension {
            value: DimensionValue::Exactly(0),
            witness: FiniteSet::new(),
            no_finite_tuple: true,
        },
        Some((n, w)) => ClosureDimension {
            value: if n == b.max_telltale_size {
                DimensionValue::AtLeast(n)
            } else {
                DimensionValue::Exactly(n)
            },
            witness: w,
            no_finite_tuple: false,
        },
    })
}

fn finite_intersection(languages: &[Fms], pick: &[usize], horizon: usize) -> Result<bool> {
    let mut acc = languages[pick[0]].clone();
    for &k in &pick[1..] {
        acc = acc.intersect(&languages[k])?;
    }
    let certified = acc.cardinality().is_finite();
    Ok(certified && acc.count_in(1, horizon as Elem) < horizon as u64)
}

/// Declared `(collection, star, kind)` triples where the witness oracle is
/// defined.
pub fn is_violation_point(c: &Collection, star: usize, kind: TellTaleKind) -> bool {
    matches!(
        (c.name(), star, kind),
        (CollectionName::SingleRemoval, 0, TellTaleKind::Strong) | (CollectionName::Suffixes, 0, TellTaleKind::Weak)
    )
}

/// Smallest `j` with `T ⊆ L_j ⊊ L_star` (plus an infinite difference for the
/// weak kind) at a declared violation point.
pub fn violation_witness(c: &Collection, star: usize, t: &FiniteSet, kind: TellTaleKind) -> Result<usize> {
    if !is_violation_point(c, star, kind) {
        return Err(Error::NotAViolationPoint {
            collection: c.id().to_string(),
            star,
            kind: kind.as_str().to_string(),
        });
    }
    if !c.language(star)?.contains_all(t) {
        return Err(Error::ContractViolation(format!("witness requested for a set outside language {star}")));
    }
    c.proper_subset_witness(star, t, kind)
        .ok_or_else(|| Error::ContractViolation(format!("no proper subset witness below language {star}")))
}
