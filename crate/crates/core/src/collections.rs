//! Builtin language collections and their oracle suites.
//!
//! Each collection is an indexed family of infinite languages with
//! closed-form membership, subset, finite-difference, tell-tale, and
//! version-space-intersection oracles. Closed forms are checked against
//! brute-force search in the tests below.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{zigzag_decode, zigzag_encode, Base, Elem, FiniteSet, Fms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CollectionName {
    /// Index 0 is the naturals; index `i >= 1` is the naturals without `i`.
    SingleRemoval,
    /// Index 0 is the integers; index `i >= 1` is the suffix starting at
    /// the integer whose zigzag id is `i`.
    Suffixes,
    /// Index `i >= 1` is the multiples of the `i`-th prime. Index 0 is
    /// outside the range.
    PrimeMultiples,
    /// Two languages over codes `c` (id `c + 1`): index 0 holds the even
    /// codes, index 1 the odd codes plus code 0.
    ParityDemo,
}

impl CollectionName {
    pub const ALL: [CollectionName; 4] = [
        CollectionName::SingleRemoval,
        CollectionName::Suffixes,
        CollectionName::PrimeMultiples,
        CollectionName::ParityDemo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CollectionName::SingleRemoval => "SINGLE_REMOVAL",
            CollectionName::Suffixes => "SUFFIXES",
            CollectionName::PrimeMultiples => "PRIME_MULTIPLES",
            CollectionName::ParityDemo => "PARITY_DEMO",
        }
    }
}

impl fmt::Display for CollectionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CollectionName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CollectionName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::config("collection", format!("unknown collection `{s}`")))
    }
}

/// Oracle families a collection may expose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capability {
    Membership,
    Subset,
    FiniteDifference,
    TelltaleStrong,
    TelltaleWeak,
    Vsi,
}

impl Capability {
    pub const ALL: [Capability; 6] = [
        Capability::Membership,
        Capability::Subset,
        Capability::FiniteDifference,
        Capability::TelltaleStrong,
        Capability::TelltaleWeak,
        Capability::Vsi,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Capability::Membership => "membership",
            Capability::Subset => "subset",
            Capability::FiniteDifference => "finite_difference",
            Capability::TelltaleStrong => "telltale_strong",
            Capability::TelltaleWeak => "telltale_weak",
            Capability::Vsi => "vsi",
        }
    }
}

impl FromStr for Capability {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Capability::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::config("capability", format!("unknown capability `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TellTaleKind {
    /// Consistent languages containing the tell-tale are never proper subsets.
    Strong,
    /// Proper subsets containing the tell-tale are allowed if they miss only
    /// finitely many elements.
    Weak,
}

impl TellTaleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TellTaleKind::Strong => "strong",
            TellTaleKind::Weak => "weak",
        }
    }

    pub fn capability(&self) -> Capability {
        match self {
            TellTaleKind::Strong => Capability::TelltaleStrong,
            TellTaleKind::Weak => Capability::TelltaleWeak,
        }
    }
}

// ---------------------------------------------------------------------------
// Primes
// ---------------------------------------------------------------------------

const SIEVE_LIMIT: usize = 2_000_000;

fn prime_table() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut composite = vec![false; SIEVE_LIMIT + 1];
        let mut primes = Vec::new();
        for n in 2..=SIEVE_LIMIT {
            if !composite[n] {
                primes.push(n as u64);
                let mut m = n * n;
                while m <= SIEVE_LIMIT {
                    composite[m] = true;
                    m += n;
                }
            }
        }
        primes
    })
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// The `i`-th prime, 1-based (`nth_prime(1) == 2`).
pub fn nth_prime(i: usize) -> u64 {
    assert!(i >= 1, "primes are 1-indexed");
    let table = prime_table();
    if i <= table.len() {
        return table[i - 1];
    }
    let mut p = *table.last().unwrap();
    for _ in table.len()..i {
        p += 1;
        while !is_prime(p) {
            p += 1;
        }
    }
    p
}

/// 1-based index of `p` among the primes, when `p` is prime.
pub fn prime_index(p: u64) -> Option<usize> {
    let table = prime_table();
    if p <= *table.last().unwrap() {
        table.binary_search(&p).ok().map(|k| k + 1)
    } else if is_prime(p) {
        let extra = (table.last().unwrap() + 1..=p).filter(|&n| is_prime(n)).count();
        Some(table.len() + extra)
    } else {
        None
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Product of the distinct prime factors of `n`.
fn radical(mut n: u64) -> u64 {
    let mut r = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            r *= d;
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        r *= n;
    }
    r
}

// ---------------------------------------------------------------------------
// Seen sets
// ---------------------------------------------------------------------------

/// The set of observed elements plus running statistics that make
/// consistency checks constant-time for the builtin families.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeenSet {
    set: FiniteSet,
    gcd: u64,
    min_value: Option<i64>,
    has_even_id: bool,
    has_odd_id_above_one: bool,
}

impl SeenSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `x`; returns whether it was new.
    pub fn insert(&mut self, x: Elem) -> bool {
        if !self.set.insert(x) {
            return false;
        }
        self.gcd = gcd(self.gcd, x);
        let v = zigzag_decode(x);
        self.min_value = Some(self.min_value.map_or(v, |m| m.min(v)));
        if x % 2 == 0 {
            self.has_even_id = true;
        } else if x > 1 {
            self.has_odd_id_above_one = true;
        }
        true
    }

    pub fn set(&self) -> &FiniteSet {
        &self.set
    }

    pub fn len(&self) -> u64 {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.set.contains(x)
    }

    pub fn min_value(&self) -> Option<i64> {
        self.min_value
    }
}

impl FromIterator<Elem> for SeenSet {
    fn from_iter<I: IntoIterator<Item = Elem>>(iter: I) -> Self {
        let mut s = SeenSet::new();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Collection
// ---------------------------------------------------------------------------

/// A builtin collection with a declared capability set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collection {
    name: CollectionName,
    capabilities: Vec<Capability>,
}

impl Collection {
    /// The collection with every oracle available.
    pub fn builtin(name: CollectionName) -> Collection {
        Collection {
            name,
            capabilities: Capability::ALL.to_vec(),
        }
    }

    /// The same collection with one oracle withdrawn.
    pub fn without(mut self, cap: Capability) -> Collection {
        self.capabilities.retain(|&c| c != cap);
        self
    }

    pub fn name(&self) -> CollectionName {
        self.name
    }

    pub fn id(&self) -> &'static str {
        self.name.as_str()
    }

    pub fn has(&self, cap: Capability) -> bool {
        self.capabilities.contains(&cap)
    }

    pub fn capabilities(&self) -> &[Capability] {
        &self.capabilities
    }

    pub fn require(&self, cap: Capability) -> Result<()> {
        if self.has(cap) {
            Ok(())
        } else {
            Err(Error::CapabilityMissing {
                collection: self.id().to_string(),
                capability: cap.as_str().to_string(),
            })
        }
    }

    pub fn first_index(&self) -> usize {
        match self.name {
            CollectionName::PrimeMultiples => 1,
            _ => 0,
        }
    }

    /// Last valid index for finite collections.
    pub fn last_index(&self) -> Option<usize> {
        match self.name {
            CollectionName::ParityDemo => Some(1),
            _ => None,
        }
    }

    pub fn in_range(&self, i: usize) -> bool {
        i >= self.first_index() && self.last_index().is_none_or(|l| i <= l)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if self.in_range(i) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                collection: self.id().to_string(),
                index: i,
            })
        }
    }

    /// Valid indices strictly below `bound`, ascending.
    pub fn indices_below(&self, bound: usize) -> std::ops::Range<usize> {
        let end = self.last_index().map_or(bound, |l| bound.min(l + 1));
        self.first_index()..end.max(self.first_index())
    }

    /// Closed form of the `i`-th language.
    pub fn language(&self, i: usize) -> Result<Fms> {
        self.check_index(i)?;
        Ok(match self.name {
            CollectionName::SingleRemoval if i == 0 => Fms::full(),
            CollectionName::SingleRemoval => Fms::full().without(&FiniteSet::singleton(i as Elem)),
            CollectionName::Suffixes if i == 0 => Fms::full(),
            CollectionName::Suffixes => Fms::suffix(zigzag_decode(i as Elem)),
            CollectionName::PrimeMultiples => Fms::multiples(nth_prime(i)),
            CollectionName::ParityDemo if i == 0 => Fms::of_base(Base::Parity { residue: 0 }),
            CollectionName::ParityDemo => {
                Fms::of_base(Base::Parity { residue: 1 }).with(&FiniteSet::singleton(1))
            }
        })
    }

    pub fn membership(&self, i: usize, x: Elem) -> Result<bool> {
        self.require(Capability::Membership)?;
        Ok(self.language(i)?.member(x))
    }

    /// Is `L_i ⊆ L_j`?
    pub fn subset(&self, i: usize, j: usize) -> Result<bool> {
        self.require(Capability::Subset)?;
        self.language(i)?.is_subset(&self.language(j)?)
    }

    /// For `L_i ⊆ L_j`: is `L_j \ L_i` finite?
    pub fn finite_difference(&self, i: usize, j: usize) -> Result<bool> {
        self.require(Capability::FiniteDifference)?;
        let (li, lj) = (self.language(i)?, self.language(j)?);
        if !li.is_subset(&lj)? {
            return Err(Error::ContractViolation(format!(
                "finite difference queried on {i}, {j} but language {i} is not a subset of language {j}"
            )));
        }
        Ok(lj.diff_card(&li)?.is_finite())
    }

    /// The first `take` elements of the `kind` tell-tale of language `i`.
    pub fn telltale(&self, i: usize, kind: TellTaleKind, take: usize) -> Result<FiniteSet> {
        self.require(kind.capability())?;
        self.check_index(i)?;
        let none = || Error::NoTellTale {
            collection: self.id().to_string(),
            index: i,
            kind: kind.as_str().to_string(),
        };
        let full: FiniteSet = match (self.name, kind) {
            (CollectionName::SingleRemoval, TellTaleKind::Strong) if i == 0 => return Err(none()),
            (CollectionName::SingleRemoval, TellTaleKind::Weak) if i == 0 => FiniteSet::singleton(1),
            (CollectionName::SingleRemoval, _) => FiniteSet::new(),
            (CollectionName::Suffixes, _) if i == 0 => return Err(none()),
            // The suffix's own least element; its id is the index itself.
            (CollectionName::Suffixes, _) => FiniteSet::singleton(i as Elem),
            (CollectionName::PrimeMultiples, _) => FiniteSet::singleton(nth_prime(i)),
            (CollectionName::ParityDemo, _) => FiniteSet::new(),
        };
        Ok(full.iter().take(take).collect())
    }

    /// Does language `i` contain every seen element? Constant time for the
    /// builtin families.
    pub fn consistent(&self, i: usize, seen: &SeenSet) -> bool {
        if !self.in_range(i) {
            return false;
        }
        if seen.is_empty() {
            return true;
        }
        match self.name {
            CollectionName::SingleRemoval => i == 0 || !seen.contains(i as Elem),
            CollectionName::Suffixes => {
                i == 0 || zigzag_decode(i as Elem) <= seen.min_value.expect("nonempty")
            }
            CollectionName::PrimeMultiples => seen.gcd % nth_prime(i) == 0,
            CollectionName::ParityDemo => {
                if i == 0 {
                    !seen.has_even_id
                } else {
                    !seen.has_odd_id_above_one
                }
            }
        }
    }

    /// Least index in `from..below` consistent with `seen`.
    pub fn next_consistent(&self, from: usize, below: usize, seen: &SeenSet) -> Option<usize> {
        let from = from.max(self.first_index());
        let below = self.last_index().map_or(below, |l| below.min(l + 1));
        if from >= below {
            return None;
        }
        if seen.is_empty() {
            return Some(from);
        }
        let found = match self.name {
            CollectionName::SingleRemoval => {
                if from == 0 {
                    Some(0)
                } else {
                    Some(seen.set.first_gap_at_or_after(from as Elem) as usize)
                }
            }
            CollectionName::Suffixes => {
                if from == 0 {
                    Some(0)
                } else {
                    let m = seen.min_value.expect("nonempty");
                    let f = from as Elem;
                    Some(if m >= 0 {
                        if f % 2 == 1 || f <= 2 * m as Elem {
                            from
                        } else {
                            from + 1
                        }
                    } else {
                        let y = f.max(zigzag_encode(m));
                        (if y % 2 == 0 { y + 1 } else { y }) as usize
                    })
                }
            }
            CollectionName::PrimeMultiples => {
                let g = seen.gcd;
                (from..below)
                    .take_while(|&i| nth_prime(i) <= g)
                    .find(|&i| g % nth_prime(i) == 0)
            }
            CollectionName::ParityDemo => (from..below).find(|&i| self.consistent(i, seen)),
        };
        found.filter(|&i| i < below)
    }

    /// Exact intersection of every language containing `samples`, over the
    /// whole collection.
    pub fn vsi_set(&self, samples: &FiniteSet) -> Result<Fms> {
        self.require(Capability::Vsi)?;
        let seen: SeenSet = samples.iter().collect();
        match self.name {
            CollectionName::SingleRemoval => Ok(Fms::finite(samples.clone())),
            CollectionName::Suffixes => Ok(match seen.min_value {
                None => Fms::empty(),
                Some(m) => Fms::suffix(m),
            }),
            CollectionName::PrimeMultiples => {
                if samples.is_empty() {
                    return Ok(Fms::empty());
                }
                if seen.gcd == 1 {
                    return Err(Error::EmptyVersionSpace);
                }
                Ok(Fms::multiples(radical(seen.gcd)))
            }
            CollectionName::ParityDemo => {
                let mut acc: Option<Fms> = None;
                for i in self.indices_below(2) {
                    if self.consistent(i, &seen) {
                        let l = self.language(i)?;
                        acc = Some(match acc {
                            None => l,
                            Some(a) => a.intersect(&l)?,
                        });
                    }
                }
                acc.ok_or(Error::EmptyVersionSpace)
            }
        }
    }

    pub fn vsi_membership(&self, samples: &FiniteSet, x: Elem) -> Result<bool> {
        Ok(self.vsi_set(samples)?.member(x))
    }

    /// Least index `j` with `T ⊆ L_j ⊊ L_star` (and, for the weak kind,
    /// `L_star \ L_j` infinite), over the whole collection.
    pub fn proper_subset_witness(&self, star: usize, t: &FiniteSet, kind: TellTaleKind) -> Option<usize> {
        if !self.in_range(star) {
            return None;
        }
        match self.name {
            CollectionName::SingleRemoval => {
                (star == 0 && kind == TellTaleKind::Strong).then(|| t.first_gap_at_or_after(1) as usize)
            }
            CollectionName::Suffixes => {
                let m = t.iter().map(zigzag_decode).min();
                if star == 0 {
                    return Some(match m {
                        Some(m) if m < 0 => zigzag_encode(m) as usize,
                        _ => 1,
                    });
                }
                if kind == TellTaleKind::Weak {
                    return None;
                }
                // Suffixes starting in (a, m] are proper subsets containing T.
                let a = zigzag_decode(star as Elem);
                let top = m.unwrap_or(i64::MAX);
                if top <= a {
                    None
                } else if a < 0 && top >= 0 {
                    Some(1)
                } else if a >= 0 {
                    Some(zigzag_encode(a + 1) as usize)
                } else {
                    Some(zigzag_encode(top) as usize)
                }
            }
            CollectionName::PrimeMultiples | CollectionName::ParityDemo => None,
        }
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(name: CollectionName) -> Collection {
        Collection::builtin(name)
    }

    fn seen(v: &[Elem]) -> SeenSet {
        v.iter().copied().collect()
    }

    #[test]
    fn builtin_examples() {
        let sr = c(CollectionName::SingleRemoval);
        assert_eq!(sr.language(0).unwrap(), Fms::full());
        assert_eq!(sr.language(3).unwrap(), Fms::full().without(&FiniteSet::singleton(3)));

        let suf = c(CollectionName::Suffixes);
        assert_eq!(suf.language(0).unwrap(), Fms::full());
        for i in 1..60 {
            let r = suf.language(i).unwrap().relate(&Fms::full()).unwrap();
            assert!(r.subset && !r.equal);
        }

        let pm = c(CollectionName::PrimeMultiples);
        let (l1, l2) = (pm.language(1).unwrap(), pm.language(2).unwrap());
        let evens: Vec<Elem> = (1..=100).filter(|x| x % 2 == 0).collect();
        assert_eq!(l1.iter().take_while(|&x| x <= 100).collect::<Vec<_>>(), evens);
        assert!(l2.member(9) && !l2.member(8));
        assert!(!pm.subset(1, 2).unwrap() && !pm.subset(2, 1).unwrap());
        assert!(matches!(pm.language(0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn oracle_examples() {
        let sr = c(CollectionName::SingleRemoval);
        assert!(!sr.membership(5, 5).unwrap());
        assert!(sr.membership(0, 12345).unwrap());
        assert!(!c(CollectionName::PrimeMultiples).membership(1, 7).unwrap());

        assert!(sr.subset(3, 0).unwrap());
        assert!(sr.finite_difference(3, 0).unwrap());
        let suf = c(CollectionName::Suffixes);
        assert!(suf.subset(7, 0).unwrap());
        assert!(!suf.finite_difference(7, 0).unwrap());
        for i in 0..10 {
            assert!(sr.subset(i, i).unwrap());
        }
        assert!(matches!(sr.finite_difference(0, 3), Err(Error::ContractViolation(_))));
        let limited = sr.clone().without(Capability::Subset);
        assert!(matches!(limited.subset(1, 0), Err(Error::CapabilityMissing { .. })));
    }

    #[test]
    fn telltale_examples() {
        let pm = c(CollectionName::PrimeMultiples);
        assert_eq!(pm.telltale(1, TellTaleKind::Strong, 5).unwrap(), FiniteSet::singleton(2));
        let sr = c(CollectionName::SingleRemoval);
        assert_eq!(sr.telltale(0, TellTaleKind::Weak, 5).unwrap(), FiniteSet::singleton(1));
        assert!(matches!(sr.telltale(0, TellTaleKind::Strong, 5), Err(Error::NoTellTale { .. })));
        let suf = c(CollectionName::Suffixes);
        assert!(matches!(suf.telltale(0, TellTaleKind::Weak, 5), Err(Error::NoTellTale { .. })));
        assert!(pm.telltale(1, TellTaleKind::Strong, 0).unwrap().is_empty());
    }

    #[test]
    fn telltales_lie_inside_their_languages() {
        for name in CollectionName::ALL {
            let col = c(name);
            for i in col.indices_below(50) {
                for kind in [TellTaleKind::Strong, TellTaleKind::Weak] {
                    if let Ok(t) = col.telltale(i, kind, 10) {
                        let l = col.language(i).unwrap();
                        assert!(t.iter().all(|x| l.member(x)), "{name} {i}");
                    }
                }
            }
        }
    }

    #[test]
    fn vsi_examples() {
        let pd = c(CollectionName::ParityDemo);
        let code = |k: Elem| k + 1;
        assert!(!pd.vsi_membership(&FiniteSet::singleton(code(0)), code(4)).unwrap());
        let two: FiniteSet = [code(0), code(2)].into_iter().collect();
        assert!(pd.vsi_membership(&two, code(4)).unwrap());
        let pm = c(CollectionName::PrimeMultiples);
        let s: FiniteSet = [6, 10].into_iter().collect();
        for x in 1..100 {
            assert_eq!(pm.vsi_membership(&s, x).unwrap(), pm.membership(1, x).unwrap());
        }
        let coprime: FiniteSet = [2, 3].into_iter().collect();
        assert_eq!(pm.vsi_set(&coprime), Err(Error::EmptyVersionSpace));
    }

    /// Intersection over consistent languages among the first `max_index`
    /// indices, evaluated pointwise.
    fn brute_vsi(col: &Collection, s: &FiniteSet, max_index: usize, x: Elem) -> Option<bool> {
        let v: Vec<Fms> = col
            .indices_below(max_index + 1)
            .map(|i| col.language(i).unwrap())
            .filter(|l| l.contains_all(s))
            .collect();
        (!v.is_empty()).then(|| v.iter().all(|l| l.member(x)))
    }

    #[test]
    fn vsi_agrees_with_bounded_brute_force() {
        let samples: Vec<Vec<Elem>> = vec![vec![1], vec![2, 4], vec![3, 5, 9], vec![6, 12], vec![7], vec![2, 3]];
        for name in CollectionName::ALL {
            let col = c(name);
            for s in &samples {
                let s: FiniteSet = s.iter().copied().collect();
                for x in 1..=200 {
                    // The single-removal family has infinitely many consistent
                    // languages; a window of 100 indices only decides x <= 100.
                    if name == CollectionName::SingleRemoval && x > 100 {
                        continue;
                    }
                    let exact = col.vsi_membership(&s, x).ok();
                    assert_eq!(exact, brute_vsi(&col, &s, 100, x), "{name} {s} x={x}");
                }
            }
        }
    }

    #[test]
    fn consistency_shortcuts_match_membership() {
        let samples: Vec<Vec<Elem>> = vec![vec![], vec![1], vec![2, 4], vec![3, 5, 9], vec![6, 12], vec![1, 2, 3, 4, 6], vec![30]];
        for name in CollectionName::ALL {
            let col = c(name);
            for s in &samples {
                let ss = seen(s);
                for i in col.indices_below(80) {
                    let brute = col.language(i).unwrap().contains_all(ss.set());
                    assert_eq!(col.consistent(i, &ss), brute, "{name} {i} {:?}", s);
                }
                for from in 0..40 {
                    let brute = col.indices_below(80).find(|&i| i >= from && col.consistent(i, &ss));
                    assert_eq!(col.next_consistent(from, 80, &ss), brute, "{name} from={from} {:?}", s);
                }
            }
        }
    }

    #[test]
    fn proper_subset_witness_matches_brute_force() {
        let ts: Vec<Vec<Elem>> = vec![vec![], vec![1], vec![1, 2, 4], vec![3], vec![2, 6], vec![5, 7, 9], vec![8, 10]];
        for name in CollectionName::ALL {
            let col = c(name);
            for star in col.indices_below(12) {
                let ls = col.language(star).unwrap();
                for t in &ts {
                    let t: FiniteSet = t.iter().copied().collect();
                    if !ls.contains_all(&t) {
                        continue;
                    }
                    for kind in [TellTaleKind::Strong, TellTaleKind::Weak] {
                        let brute = col.indices_below(400).find(|&j| {
                            let lj = col.language(j).unwrap();
                            let r = lj.relate(&ls).unwrap();
                            lj.contains_all(&t)
                                && r.subset
                                && !r.equal
                                && (kind == TellTaleKind::Strong || !r.rev_diff_card.is_finite())
                        });
                        assert_eq!(col.proper_subset_witness(star, &t, kind), brute, "{name} {star} {t} {kind:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn primes() {
        assert_eq!((1..=6).map(nth_prime).collect::<Vec<_>>(), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(prime_index(13), Some(6));
        assert_eq!(prime_index(15), None);
        assert_eq!(radical(72), 6);
    }
}
