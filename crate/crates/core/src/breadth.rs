//! Breadth verdicts: exact checks of a generator's support (or output
//! enumeration) against a target language.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::collections::{Collection, TellTaleKind};
use crate::error::{Error, Result};
use crate::sets::{Cardinality, FiniteSet, Fms};

/// Notions a duel can track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Notion {
    Exact,
    Approx,
    Exhaustive,
    ExhaustiveVariant,
    Unambiguous,
    InfiniteCoverage,
}

impl Notion {
    pub const ALL: [Notion; 6] = [
        Notion::Exact,
        Notion::Approx,
        Notion::Exhaustive,
        Notion::ExhaustiveVariant,
        Notion::Unambiguous,
        Notion::InfiniteCoverage,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Notion::Exact => "EXACT",
            Notion::Approx => "APPROX",
            Notion::Exhaustive => "EXHAUSTIVE",
            Notion::ExhaustiveVariant => "EXHAUSTIVE_VARIANT",
            Notion::Unambiguous => "UNAMBIGUOUS",
            Notion::InfiniteCoverage => "INFINITE_COVERAGE",
        }
    }

    /// Witness strength the phased adversary needs for this predicate.
    /// Notions with a uniqueness property pair with strong witnesses; those
    /// that only separate languages at infinite distance pair with weak ones.
    /// Infinite coverage is not an adversary predicate.
    pub fn witness_kind(&self) -> Option<TellTaleKind> {
        match self {
            Notion::Exact | Notion::Unambiguous => Some(TellTaleKind::Strong),
            Notion::Approx | Notion::Exhaustive | Notion::ExhaustiveVariant => Some(TellTaleKind::Weak),
            Notion::InfiniteCoverage => None,
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Notion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Notion::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::config("notion", format!("unknown notion `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExhaustiveVariant {
    /// Finitely many hallucinations allowed.
    FiniteHallucination,
    /// No hallucinations allowed.
    NoHallucination,
}

/// Cardinalities behind a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    /// Output elements outside the target.
    pub hallucination_card: Cardinality,
    /// Target elements the output misses.
    pub missing_card: Cardinality,
    /// Target elements the output hits.
    pub overlap_card: Cardinality,
    /// A rival at least as close as the target (unambiguity only).
    pub rival: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreadthVerdict {
    pub holds: bool,
    pub evidence: Evidence,
    /// Set when only finitely many rivals were examined.
    pub bounded: bool,
}

impl BreadthVerdict {
    fn new(holds: bool, hallucination: Cardinality, missing: Cardinality, overlap: Cardinality) -> Self {
        BreadthVerdict {
            holds,
            evidence: Evidence {
                hallucination_card: hallucination,
                missing_card: missing,
                overlap_card: overlap,
                rival: None,
            },
            bounded: false,
        }
    }
}

fn overlap(a: &Fms, b: &Fms) -> Result<Cardinality> {
    Ok(a.intersect(b)?.cardinality())
}

/// `supp ∪ S = K`.
pub fn check_exact(supp: &Fms, k: &Fms, seen: &FiniteSet) -> Result<BreadthVerdict> {
    let covered = supp.with(seen);
    let r = covered.relate(k)?;
    Ok(BreadthVerdict::new(r.equal, r.diff_card, r.rev_diff_card, overlap(&covered, k)?))
}

/// `supp ⊆ K` and `K \ supp` finite.
pub fn check_approximate(supp: &Fms, k: &Fms) -> Result<BreadthVerdict> {
    let r = supp.relate(k)?;
    let holds = r.subset && r.rev_diff_card.is_finite();
    Ok(BreadthVerdict::new(holds, r.diff_card, r.rev_diff_card, overlap(supp, k)?))
}

/// Exhaustive generation for an output enumeration. Coverage is checked
/// against `S ∪ firsts ∪ stream`, where `firsts` holds every first element
/// emitted so far.
pub fn check_exhaustive(
    stream: &Fms,
    firsts: &FiniteSet,
    k: &Fms,
    seen: &FiniteSet,
    variant: ExhaustiveVariant,
) -> Result<BreadthVerdict> {
    let hallucination = stream.diff_card(k)?;
    let covered = stream.with(&seen.union(firsts));
    let missing = k.diff_card(&covered)?;
    let hallucination_ok = match variant {
        ExhaustiveVariant::FiniteHallucination => hallucination.is_finite(),
        ExhaustiveVariant::NoHallucination => hallucination.is_zero(),
    };
    let holds = hallucination_ok && missing.is_zero();
    Ok(BreadthVerdict::new(holds, hallucination, missing, overlap(stream, k)?))
}

/// Symmetric difference to the target is finite and strictly smaller than
/// to every other language among the first `rival_bound + 1` indices.
/// The verdict is flagged as bounded.
pub fn check_unambiguous(supp: &Fms, c: &Collection, k_index: usize, rival_bound: usize) -> Result<BreadthVerdict> {
    let k = c.language(k_index)?;
    let r = supp.relate(&k)?;
    let mut v = BreadthVerdict::new(false, r.diff_card, r.rev_diff_card, overlap(supp, &k)?);
    v.bounded = true;
    let m = match r.symdiff_card {
        Cardinality::Finite(m) => m,
        Cardinality::Infinite => return Ok(v),
    };
    for j in c.indices_below(rival_bound + 1) {
        if j == k_index {
            continue;
        }
        let lj = c.language(j)?;
        if lj == k {
            continue;
        }
        if let Cardinality::Finite(d) = supp.relate(&lj)?.symdiff_card {
            if d <= m {
                v.evidence.rival = Some(j);
                return Ok(v);
            }
        }
    }
    v.holds = true;
    Ok(v)
}

/// `supp ⊆ K`, `supp ∩ S = ∅`, and `supp` infinite.
pub fn check_infinite_coverage(supp: &Fms, k: &Fms, seen: &FiniteSet) -> Result<BreadthVerdict> {
    let r = supp.relate(k)?;
    let touches_seen = seen.runs().iter().any(|&(a, b)| supp.count_in(a, b) > 0);
    let infinite = !supp.cardinality().is_finite();
    let holds = r.subset && !touches_seen && infinite;
    Ok(BreadthVerdict::new(holds, r.diff_card, r.rev_diff_card, overlap(supp, k)?))
}

/// Supports are nested, and every snapshot other than `K` is strictly
/// exceeded by a later one. Judged over the given window only.
pub fn check_increasing_coverage(history: &[Fms], k: &Fms) -> Result<BreadthVerdict> {
    let Some(last) = history.last() else {
        return Ok(BreadthVerdict::new(false, Cardinality::Infinite, Cardinality::Infinite, Cardinality::Finite(0)));
    };
    let mut holds = true;
    for w in history.windows(2) {
        if !w[0].is_subset(&w[1])? {
            holds = false;
        }
    }
    // Under nesting, a later strict superset exists iff the final snapshot
    // differs from this one.
    if holds {
        holds = history.iter().all(|s| s == k || s != last);
    }
    let r = last.relate(k)?;
    Ok(BreadthVerdict::new(holds, r.diff_card, r.rev_diff_card, overlap(last, k)?))
}

/// What a checker sees of a generator at one step.
#[derive(Debug, Clone, Copy)]
pub struct View<'a> {
    /// Support, or the output enumeration's stream.
    pub output: &'a Fms,
    pub seen: &'a FiniteSet,
    pub firsts: &'a FiniteSet,
}

/// Checks `notion` for the language at `target`. Unambiguity compares
/// against rivals up to `rival_bound`.
pub fn evaluate(notion: Notion, view: &View<'_>, c: &Collection, target: usize, rival_bound: usize) -> Result<BreadthVerdict> {
    let k = c.language(target)?;
    match notion {
        Notion::Exact => check_exact(view.output, &k, view.seen),
        Notion::Approx => check_approximate(view.output, &k),
        Notion::Exhaustive => check_exhaustive(view.output, view.firsts, &k, view.seen, ExhaustiveVariant::FiniteHallucination),
        Notion::ExhaustiveVariant => {
            check_exhaustive(view.output, view.firsts, &k, view.seen, ExhaustiveVariant::NoHallucination)
        }
        Notion::Unambiguous => check_unambiguous(view.output, c, target, rival_bound),
        Notion::InfiniteCoverage => check_infinite_coverage(view.output, &k, view.seen),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collections::CollectionName;
    use crate::sets::Cardinality::{Finite, Infinite};

    fn fs(v: &[u64]) -> FiniteSet {
        v.iter().copied().collect()
    }

    fn nat_minus(v: &[u64]) -> Fms {
        Fms::full().without(&fs(v))
    }

    #[test]
    fn exact_examples() {
        let k = nat_minus(&[4]);
        let s = fs(&[1, 2, 3]);
        assert!(check_exact(&k.without(&s), &k, &s).unwrap().holds);
        assert!(check_exact(&nat_minus(&[1]), &Fms::full(), &fs(&[1])).unwrap().holds);
        let v = check_exact(&nat_minus(&[1, 9]), &Fms::full(), &fs(&[1])).unwrap();
        assert!(!v.holds);
        assert_eq!(v.evidence.missing_card, Finite(1));
    }

    #[test]
    fn approximate_examples() {
        let v = check_approximate(&Fms::full().without(&FiniteSet::range(1, 7)), &Fms::full()).unwrap();
        assert!(v.holds);
        assert_eq!(v.evidence.missing_card, Finite(7));
        let v = check_approximate(&Fms::suffix(5), &Fms::full()).unwrap();
        assert!(!v.holds);
        assert_eq!(v.evidence.missing_card, Infinite);
        let v = check_approximate(&Fms::suffix(5), &Fms::suffix(5)).unwrap();
        assert!(v.holds && v.evidence.missing_card == Finite(0));
    }

    #[test]
    fn exhaustive_examples() {
        let k = nat_minus(&[5]);
        let stream = Fms::full().without(&FiniteSet::range(1, 6));
        let seen = fs(&[1, 2, 3, 4, 6]);
        let firsts = FiniteSet::range(1, 7);
        for variant in [ExhaustiveVariant::FiniteHallucination, ExhaustiveVariant::NoHallucination] {
            let v = check_exhaustive(&stream, &firsts, &k, &seen, variant).unwrap();
            assert!(v.holds);
            assert_eq!(v.evidence.hallucination_card, Finite(0));
        }
        let v18 = check_exhaustive(&Fms::full(), &FiniteSet::new(), &k, &FiniteSet::new(), ExhaustiveVariant::NoHallucination).unwrap();
        assert!(!v18.holds);
        let v6 = check_exhaustive(&Fms::full(), &FiniteSet::new(), &k, &FiniteSet::new(), ExhaustiveVariant::FiniteHallucination).unwrap();
        assert!(v6.holds);
        assert_eq!(v6.evidence.hallucination_card, Finite(1));
        for variant in [ExhaustiveVariant::FiniteHallucination, ExhaustiveVariant::NoHallucination] {
            assert!(check_exhaustive(&k, &FiniteSet::new(), &k, &FiniteSet::new(), variant).unwrap().holds);
        }
    }

    #[test]
    fn unambiguous_examples() {
        let c = Collection::builtin(CollectionName::SingleRemoval);
        let v = check_unambiguous(&Fms::full(), &c, 0, 50).unwrap();
        assert!(v.holds && v.bounded);
        let v = check_unambiguous(&nat_minus(&[1, 2]), &c, 0, 50).unwrap();
        assert!(!v.holds);
        assert_eq!(v.evidence.rival, Some(1));
        let v = check_unambiguous(&Fms::suffix(3), &Collection::builtin(CollectionName::Suffixes), 0, 50).unwrap();
        assert!(!v.holds);
    }

    #[test]
    fn infinite_coverage_examples() {
        let seen = fs(&[2, 3]);
        let supp = nat_minus(&[1, 2, 3]);
        assert!(check_infinite_coverage(&supp, &nat_minus(&[1]), &seen).unwrap().holds);
        assert!(!check_infinite_coverage(&nat_minus(&[1, 2]), &nat_minus(&[1]), &seen).unwrap().holds);
        assert!(!check_infinite_coverage(&Fms::finite(fs(&[4, 5])), &Fms::full(), &seen).unwrap().holds);
    }

    #[test]
    fn increasing_coverage_examples() {
        let k = Fms::suffix(2);
        let chain = vec![Fms::suffix(5), Fms::suffix(3), Fms::suffix(2), Fms::suffix(2)];
        assert!(check_increasing_coverage(&chain, &k).unwrap().holds);
        let flat = vec![Fms::suffix(5), Fms::suffix(5)];
        assert!(!check_increasing_coverage(&flat, &k).unwrap().holds);
        let shrink = vec![Fms::suffix(2), Fms::suffix(3)];
        assert!(!check_increasing_coverage(&shrink, &k).unwrap().holds);
    }

    #[test]
    fn the_target_itself_passes_every_notion() {
        for name in CollectionName::ALL {
            let c = Collection::builtin(name);
            for i in c.indices_below(20) {
                let k = c.language(i).unwrap();
                let none = FiniteSet::new();
                assert!(check_exact(&k, &k, &none).unwrap().holds);
                assert!(check_approximate(&k, &k).unwrap().holds);
                assert!(check_exhaustive(&k, &none, &k, &none, ExhaustiveVariant::NoHallucination).unwrap().holds);
                assert!(check_unambiguous(&k, &c, i, 50).unwrap().holds, "{name} {i}");
                assert!(check_infinite_coverage(&k, &k, &none).unwrap().holds);
            }
        }
    }
}
