//! Finitely modified sets over the canonical domain.
//!
//! Every language and every generator support handled by the lab is a base
//! set drawn from a small closed family, plus finitely many additions, minus
//! finitely many removals. Relations between two such sets are computed
//! exactly from per-family closed forms, so "is the difference finite" is a
//! decidable question here.
//!
//! The domain is the positive integers, enumerated in increasing order.
//! Integer-valued collections are mapped onto it by the zigzag bijection
//! `0, 1, -1, 2, -2, ...` to `1, 2, 3, 4, 5, ...`. Id `0` is reserved as a
//! sentinel that belongs to no set.

use std::cmp::{max, min, Ordering};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A domain element id. Valid elements are `>= 1`.
pub type Elem = u64;

/// The reserved id that lies outside the domain.
pub const SENTINEL: Elem = 0;

/// Maps an integer to its domain id: `z > 0` to `2z`, `z <= 0` to `1 - 2z`.
pub fn zigzag_encode(z: i64) -> Elem {
    if z > 0 {
        2 * z as u64
    } else {
        (1 - 2 * z as i128) as u64
    }
}

/// Inverse of [`zigzag_encode`]. Panics on the sentinel.
pub fn zigzag_decode(id: Elem) -> i64 {
    assert!(id != SENTINEL, "sentinel has no integer value");
    if id % 2 == 0 {
        (id / 2) as i64
    } else {
        -(((id - 1) / 2) as i64)
    }
}

// ---------------------------------------------------------------------------
// Cardinality
// ---------------------------------------------------------------------------

/// Exact size of a set: a finite count or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "n")]
pub enum Cardinality {
    Finite(u64),
    Infinite,
}

impl Cardinality {
    pub fn is_finite(self) -> bool {
        matches!(self, Cardinality::Finite(_))
    }

    pub fn is_zero(self) -> bool {
        self == Cardinality::Finite(0)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Cardinality::Finite(n) => Some(n),
            Cardinality::Infinite => None,
        }
    }
}

impl std::ops::Add for Cardinality {
    type Output = Cardinality;
    fn add(self, rhs: Cardinality) -> Cardinality {
        match (self, rhs) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => Cardinality::Finite(a + b),
            _ => Cardinality::Infinite,
        }
    }
}

impl PartialOrd for Cardinality {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cardinality {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => a.cmp(b),
            (Cardinality::Finite(_), Cardinality::Infinite) => Ordering::Less,
            (Cardinality::Infinite, Cardinality::Finite(_)) => Ordering::Greater,
            (Cardinality::Infinite, Cardinality::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => write!(f, "inf"),
        }
    }
}

// ---------------------------------------------------------------------------
// FiniteSet
// ---------------------------------------------------------------------------

/// A finite set of domain elements stored as sorted, disjoint,
/// non-adjacent inclusive runs. Long consecutive stretches (the usual shape
/// of a seen-set under canonical enumeration) cost one run.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<[Elem; 2]>", into = "Vec<[Elem; 2]>")]
pub struct FiniteSet {
    runs: Vec<(Elem, Elem)>,
}

impl TryFrom<Vec<[Elem; 2]>> for FiniteSet {
    type Error = String;
    fn try_from(raw: Vec<[Elem; 2]>) -> std::result::Result<Self, String> {
        let mut out = FiniteSet::new();
        for [lo, hi] in raw {
            if lo > hi {
                return Err(format!("run [{lo}, {hi}] is reversed"));
            }
            out = out.union(&FiniteSet::range(lo, hi));
        }
        Ok(out)
    }
}

impl From<FiniteSet> for Vec<[Elem; 2]> {
    fn from(s: FiniteSet) -> Self {
        s.runs.into_iter().map(|(a, b)| [a, b]).collect()
    }
}

impl FromIterator<Elem> for FiniteSet {
    fn from_iter<I: IntoIterator<Item = Elem>>(iter: I) -> Self {
        let mut v: Vec<Elem> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let mut out = FiniteSet::new();
        for x in v {
            out.push_ascending(x, x);
        }
        out
    }
}

impl FiniteSet {
    pub fn new() -> Self {
        FiniteSet { runs: Vec::new() }
    }

    pub fn singleton(x: Elem) -> Self {
        FiniteSet { runs: vec![(x, x)] }
    }

    /// The inclusive range `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: Elem, hi: Elem) -> Self {
        if lo > hi {
            FiniteSet::new()
        } else {
            FiniteSet { runs: vec![(lo, hi)] }
        }
    }

    /// Appends a run lying entirely above every stored element.
    fn push_ascending(&mut self, lo: Elem, hi: Elem) {
        if let Some(last) = self.runs.last_mut() {
            debug_assert!(lo > last.1);
            if last.1 + 1 == lo {
                last.1 = hi;
                return;
            }
        }
        self.runs.push((lo, hi));
    }

    pub fn runs(&self) -> &[(Elem, Elem)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().map(|(a, b)| b - a + 1).sum()
    }

    pub fn min(&self) -> Option<Elem> {
        self.runs.first().map(|r| r.0)
    }

    pub fn max(&self) -> Option<Elem> {
        self.runs.last().map(|r| r.1)
    }

    pub fn run_containing(&self, x: Elem) -> Option<(Elem, Elem)> {
        let idx = self.runs.partition_point(|r| r.0 <= x);
        if idx > 0 && self.runs[idx - 1].1 >= x {
            Some(self.runs[idx - 1])
        } else {
            None
        }
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.run_containing(x).is_some()
    }

    /// Smallest stored element `>= x`.
    pub fn next_at_or_after(&self, x: Elem) -> Option<Elem> {
        let idx = self.runs.partition_point(|r| r.1 < x);
        self.runs.get(idx).map(|r| max(r.0, x))
    }

    /// Smallest element `>= x` that is not stored.
    pub fn first_gap_at_or_after(&self, x: Elem) -> Elem {
        match self.run_containing(x) {
            Some((_, hi)) => hi + 1,
            None => x,
        }
    }

    /// Number of stored elements in `lo..=hi`.
    pub fn count_in(&self, lo: Elem, hi: Elem) -> u64 {
        if lo > hi {
            return 0;
        }
        let start = self.runs.partition_point(|r| r.1 < lo);
        let mut n = 0;
        for &(a, b) in &self.runs[start..] {
            if a > hi {
                break;
            }
            n += min(b, hi) - max(a, lo) + 1;
        }
        n
    }

    pub fn insert(&mut self, x: Elem) -> bool {
        if self.contains(x) {
            return false;
        }
        *self = self.union(&FiniteSet::singleton(x));
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.runs.iter().flat_map(|&(a, b)| a..=b)
    }

    pub fn union(&self, other: &FiniteSet) -> FiniteSet {
        let (mut i, mut j) = (0, 0);
        let mut out = FiniteSet::new();
        let mut cur: Option<(Elem, Elem)> = None;
        loop {
            let next = match (self.runs.get(i), other.runs.get(j)) {
                (Some(&a), Some(&b)) => {
                    if a.0 <= b.0 {
                        i += 1;
                        a
                    } else {
                        j += 1;
                        b
                    }
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => break,
            };
            cur = match cur {
                None => Some(next),
                Some((lo, hi)) if next.0 <= hi.saturating_add(1) => Some((lo, max(hi, next.1))),
                Some(run) => {
                    out.runs.push(run);
                    Some(next)
                }
            };
        }
        if let Some(run) = cur {
            out.runs.push(run);
        }
        out
    }

    pub fn intersection(&self, other: &FiniteSet) -> FiniteSet {
        let (mut i, mut j) = (0, 0);
        let mut out = FiniteSet::new();
        while i < self.runs.len() && j < other.runs.len() {
            let (a, b) = (self.runs[i], other.runs[j]);
            let lo = max(a.0, b.0);
            let hi = min(a.1, b.1);
            if lo <= hi {
                out.push_ascending(lo, hi);
            }
            if a.1 < b.1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        out
    }

    pub fn difference(&self, other: &FiniteSet) -> FiniteSet {
        let mut out = FiniteSet::new();
        let mut j = 0;
        for &(a, b) in &self.runs {
            let mut lo = a;
            while j < other.runs.len() && other.runs[j].1 < lo {
                j += 1;
            }
            let mut k = j;
            while lo <= b {
                match other.runs.get(k) {
                    Some(&(c, d)) if c <= b => {
                        if c > lo {
                            out.push_ascending(lo, c - 1);
                        }
                        lo = d.saturating_add(1);
                        if d >= b {
                            break;
                        }
                        k += 1;
                    }
                    _ => {
                        out.push_ascending(lo, b);
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Elements of `self` that belong to `base`.
    pub fn restrict_to(&self, base: &Base) -> FiniteSet {
        let mut out = FiniteSet::new();
        for &(a, b) in &self.runs {
            for run in base.members_in(a, b).runs {
                out.push_run(run);
            }
        }
        out
    }

    /// Appends a run that starts after every existing element.
    fn push_run(&mut self, (lo, hi): (Elem, Elem)) {
        match self.runs.last_mut() {
            Some(last) if lo <= last.1.saturating_add(1) => last.1 = max(last.1, hi),
            _ => self.runs.push((lo, hi)),
        }
    }

    /// Elements of `self` outside `base`.
    pub fn outside(&self, base: &Base) -> FiniteSet {
        self.difference(&self.restrict_to(base))
    }

    /// Number of elements of `self` that belong to `base`.
    pub fn count_in_base(&self, base: &Base) -> u64 {
        self.runs.iter().map(|&(a, b)| base.count_in(a, b)).sum()
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, &(a, b)) in self.runs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            if a == b {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}..{b}")?;
            }
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// Base
// ---------------------------------------------------------------------------

/// Closed families of base sets. Each family comes with closed-form
/// membership, successor, counting, and pairwise relations.
///
/// `Suffix { from: a }` is the set of ids whose zigzag value is `>= a`.
/// `Parity { residue: r }` is the set of ids whose code `id - 1` is `r` mod 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Base {
    Empty,
    Full,
    Suffix { from: i64 },
    Multiples { of: u64 },
    Parity { residue: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Trivial,
    Suffix,
    Multiples,
    Parity,
}

/// Exact `A \ B` for two bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseDiff {
    Finite(FiniteSet),
    Infinite,
}

fn count_even(lo: Elem, hi: Elem) -> u64 {
    if lo > hi {
        0
    } else {
        hi / 2 - (lo - 1) / 2
    }
}

fn count_odd(lo: Elem, hi: Elem) -> u64 {
    if lo > hi {
        0
    } else {
        (hi - lo + 1) - count_even(lo, hi)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Base {
    fn family(&self) -> Family {
        match self {
            Base::Empty | Base::Full => Family::Trivial,
            Base::Suffix { .. } => Family::Suffix,
            Base::Multiples { .. } => Family::Multiples,
            Base::Parity { .. } => Family::Parity,
        }
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, Base::Empty)
    }

    /// Largest odd id inside a suffix that starts at or below zero.
    fn suffix_odd_cap(a: i64) -> Option<Elem> {
        (a <= 0).then(|| zigzag_encode(a))
    }

    pub fn contains(&self, x: Elem) -> bool {
        if x == SENTINEL {
            return false;
        }
        match *self {
            Base::Empty => false,
            Base::Full => true,
            Base::Suffix { from } => zigzag_decode(x) >= from,
            Base::Multiples { of } => x % of == 0,
            Base::Parity { residue } => (x - 1) % 2 == residue as u64,
        }
    }

    /// Smallest member `>= x`.
    pub fn next_ge(&self, x: Elem) -> Option<Elem> {
        let x = max(x, 1);
        match *self {
            Base::Empty => None,
            Base::Full => Some(x),
            Base::Suffix { from } => match Base::suffix_odd_cap(from) {
                None => {
                    let y = max(x, 2 * from as u64);
                    Some(if y % 2 == 1 { y + 1 } else { y })
                }
                Some(cap) => Some(if x % 2 == 0 || x <= cap { x } else { x + 1 }),
            },
            Base::Multiples { of } => Some(x.div_ceil(of) * of),
            Base::Parity { residue } => {
                Some(if (x - 1) % 2 == residue as u64 { x } else { x + 1 })
            }
        }
    }

    /// Number of members in `lo..=hi`.
    pub fn count_in(&self, lo: Elem, hi: Elem) -> u64 {
        let lo = max(lo, 1);
        if lo > hi {
            return 0;
        }
        match *self {
            Base::Empty => 0,
            Base::Full => hi - lo + 1,
            Base::Suffix { from } => match Base::suffix_odd_cap(from) {
                None => count_even(max(lo, 2 * from as u64), hi),
                Some(cap) => count_even(lo, hi) + count_odd(lo, min(hi, cap)),
            },
            Base::Multiples { of } => hi / of - (lo - 1) / of,
            Base::Parity { residue } => {
                if residue == 0 {
                    count_odd(lo, hi)
                } else {
                    count_even(lo, hi)
                }
            }
        }
    }

    /// Members in `lo..=hi` as a finite set.
    pub fn members_in(&self, lo: Elem, hi: Elem) -> FiniteSet {
        let lo = max(lo, 1);
        if lo > hi {
            return FiniteSet::new();
        }
        let mut out = FiniteSet::new();
        let mut start = lo;
        // Runs that are fully contiguous inside the base.
        let contiguous_to = match *self {
            Base::Full => Some(hi),
            Base::Suffix { from } => Base::suffix_odd_cap(from).map(|cap| min(hi, cap + 1)),
            _ => None,
        };
        if let Some(top) = contiguous_to {
            if start <= top {
                out.push_ascending(start, top);
                start = top + 1;
            }
        }
        let mut x = start;
        while x <= hi {
            match self.next_ge(x) {
                Some(y) if y <= hi => {
                    out.push_ascending(y, y);
                    x = y + 1;
                }
                _ => break,
            }
        }
        out
    }

    /// Exact `self \ other`, or `UnknownBasePair` across families.
    pub fn diff(&self, other: &Base) -> Result<BaseDiff> {
        use BaseDiff::{Finite, Infinite};
        if self == other || matches!(self, Base::Empty) || matches!(other, Base::Full) {
            return Ok(Finite(FiniteSet::new()));
        }
        if matches!(other, Base::Empty) || matches!(self, Base::Full) {
            return Ok(Infinite);
        }
        match (*self, *other) {
            (Base::Suffix { from: a }, Base::Suffix { from: b }) => {
                if a >= b {
                    Ok(Finite(FiniteSet::new()))
                } else {
                    Ok(Finite((a..b).map(zigzag_encode).collect()))
                }
            }
            (Base::Multiples { of: m }, Base::Multiples { of: n }) => {
                if m % n == 0 {
                    Ok(Finite(FiniteSet::new()))
                } else {
                    Ok(Infinite)
                }
            }
            (Base::Parity { .. }, Base::Parity { .. }) => Ok(Infinite),
            (a, b) => Err(Error::UnknownBasePair { a, b }),
        }
    }

    pub fn intersect(&self, other: &Base) -> Result<Base> {
        match (*self, *other) {
            (Base::Empty, _) | (_, Base::Empty) => Ok(Base::Empty),
            (Base::Full, b) | (b, Base::Full) => Ok(b),
            (Base::Suffix { from: a }, Base::Suffix { from: b }) => Ok(Base::Suffix { from: max(a, b) }),
            (Base::Multiples { of: m }, Base::Multiples { of: n }) => Ok(Base::Multiples {
                of: m / gcd(m, n) * n,
            }),
            (Base::Parity { residue: r }, Base::Parity { residue: s }) => {
                Ok(if r == s { *self } else { Base::Empty })
            }
            (a, b) => {
                debug_assert_ne!(a.family(), b.family());
                Err(Error::UnknownBasePair { a, b })
            }
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Empty => write!(f, "EMPTY"),
            Base::Full => write!(f, "FULL"),
            Base::Suffix { from } => write!(f, "SUFFIX({from})"),
            Base::Multiples { of } => write!(f, "MULT({of})"),
            Base::Parity { residue } => write!(f, "PARITY({residue})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Fms
// ---------------------------------------------------------------------------

/// A base set with finite corrections, always held in normal form:
/// `add` is disjoint from the base, `sub` lies inside the base, and for
/// suffix bases the base starts at the least member (so `add` is empty).
/// Normal forms are unique, so structural equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawFms")]
pub struct Fms {
    base: Base,
    add: FiniteSet,
    sub: FiniteSet,
}

#[derive(Deserialize)]
struct RawFms {
    base: Base,
    #[serde(default)]
    add: FiniteSet,
    #[serde(default)]
    sub: FiniteSet,
}

impl From<RawFms> for Fms {
    fn from(r: RawFms) -> Self {
        Fms::new(r.base, r.add, r.sub)
    }
}

/// Exact relation between two sets `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub subset: bool,
    pub equal: bool,
    /// `|a \ b|`
    pub diff_card: Cardinality,
    /// `|b \ a|`
    pub rev_diff_card: Cardinality,
    pub symdiff_card: Cardinality,
}

impl Fms {
    /// Builds the set `(base ∪ add) \ sub` in normal form.
    pub fn new(base: Base, add: FiniteSet, sub: FiniteSet) -> Fms {
        let base = match base {
            Base::Multiples { of: 1 } => Base::Full,
            Base::Multiples { of: 0 } => panic!("multiples of zero"),
            Base::Parity { residue } if residue > 1 => panic!("parity residue must be 0 or 1"),
            b => b,
        };
        let add = add.difference(&sub).outside(&base);
        let sub = sub.restrict_to(&base);
        match base {
            Base::Suffix { from } => Fms::canonical_suffix(from, add, sub),
            _ => Fms { base, add, sub },
        }
    }

    /// Re-bases a suffix-family set at its least member.
    fn canonical_suffix(from: i64, add: FiniteSet, sub: FiniteSet) -> Fms {
        let least_added = add.iter().map(zigzag_decode).min();
        let mut z = from;
        while sub.contains(zigzag_encode(z)) {
            z += 1;
        }
        let least = least_added.map_or(z, |m| min(m, z));
        let new_base = Base::Suffix { from: least };
        let sub = if least < from {
            // Everything in [least, from) that was not added is now removed.
            let gap: FiniteSet = (least..from).map(zigzag_encode).collect();
            gap.difference(&add).union(&sub)
        } else {
            sub.restrict_to(&new_base)
        };
        Fms {
            base: new_base,
            add: FiniteSet::new(),
            sub,
        }
    }

    pub fn of_base(base: Base) -> Fms {
        Fms::new(base, FiniteSet::new(), FiniteSet::new())
    }

    pub fn full() -> Fms {
        Fms::of_base(Base::Full)
    }

    pub fn empty() -> Fms {
        Fms::of_base(Base::Empty)
    }

    pub fn finite(set: FiniteSet) -> Fms {
        Fms::new(Base::Empty, set, FiniteSet::new())
    }

    pub fn suffix(from: i64) -> Fms {
        Fms::of_base(Base::Suffix { from })
    }

    pub fn multiples(of: u64) -> Fms {
        Fms::of_base(Base::Multiples { of })
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn add(&self) -> &FiniteSet {
        &self.add
    }

    pub fn sub(&self) -> &FiniteSet {
        &self.sub
    }

    pub fn member(&self, x: Elem) -> bool {
        (self.base.contains(x) && !self.sub.contains(x)) || self.add.contains(x)
    }

    /// `(self ∪ plus) \ minus`, normalized.
    pub fn modify(&self, plus: &FiniteSet, minus: &FiniteSet) -> Fms {
        let add = self.add.union(plus).difference(minus);
        let sub = self.sub.difference(plus).union(minus);
        Fms::new(self.base, add, sub)
    }

    pub fn without(&self, minus: &FiniteSet) -> Fms {
        self.modify(&FiniteSet::new(), minus)
    }

    pub fn with(&self, plus: &FiniteSet) -> Fms {
        self.modify(plus, &FiniteSet::new())
    }

    pub fn cardinality(&self) -> Cardinality {
        if self.base.is_infinite() {
            Cardinality::Infinite
        } else {
            Cardinality::Finite(self.add.len())
        }
    }

    /// Number of members in `lo..=hi`.
    pub fn count_in(&self, lo: Elem, hi: Elem) -> u64 {
        self.base.count_in(lo, hi) - self.sub.count_in(lo, hi) + self.add.count_in(lo, hi)
    }

    pub fn contains_all(&self, s: &FiniteSet) -> bool {
        s.runs().iter().all(|&(a, b)| a != SENTINEL && self.count_in(a, b) == b - a + 1)
    }

    /// Least member `>= x`.
    pub fn next_member_at_or_after(&self, x: Elem) -> Option<Elem> {
        let mut from = max(x, 1);
        let from_base = loop {
            match self.base.next_ge(from) {
                None => break None,
                Some(y) => match self.sub.run_containing(y) {
                    Some((_, hi)) => from = hi + 1,
                    None => break Some(y),
                },
            }
        };
        let from_add = self.add.next_at_or_after(max(x, 1));
        match (from_base, from_add) {
            (Some(a), Some(b)) => Some(min(a, b)),
            (a, b) => a.or(b),
        }
    }

    /// Members in canonical (increasing id) order.
    pub fn iter(&self) -> FmsIter<'_> {
        FmsIter { set: self, next: 1 }
    }

    /// The first `horizon` members in canonical order.
    pub fn enumerate(&self, horizon: usize) -> Vec<Elem> {
        self.iter().take(horizon).collect()
    }

    /// The `k`-th member (1-based) in canonical order.
    pub fn nth(&self, k: u64) -> Option<Elem> {
        if k == 0 {
            return None;
        }
        self.iter().nth((k - 1) as usize)
    }

    pub fn first(&self) -> Option<Elem> {
        self.next_member_at_or_after(1)
    }

    /// Exact `|self \ other|`.
    pub fn diff_card(&self, other: &Fms) -> Result<Cardinality> {
        // Base part: members of our base outside the other's base.
        let from_base = match self.base.diff(&other.base)? {
            BaseDiff::Infinite => return Ok(Cardinality::Infinite),
            BaseDiff::Finite(d) => d.difference(&self.sub).difference(&other.add).len(),
        };
        // Our base members the other removes explicitly.
        let removed = other.sub.difference(&self.sub).count_in_base(&self.base);
        // Our additions that the other lacks.
        let kept = self.add.count_in_base(&other.base) - self.add.intersection(&other.sub).len()
            + self.add.intersection(&other.add).len();
        let from_add = self.add.len() - kept;
        Ok(Cardinality::Finite(from_base + removed + from_add))
    }

    pub fn relate(&self, other: &Fms) -> Result<Relation> {
        let diff = self.diff_card(other)?;
        let rev = other.diff_card(self)?;
        Ok(Relation {
            subset: diff.is_zero(),
            equal: diff.is_zero() && rev.is_zero(),
            diff_card: diff,
            rev_diff_card: rev,
            symdiff_card: diff + rev,
        })
    }

    pub fn is_subset(&self, other: &Fms) -> Result<bool> {
        Ok(self.diff_card(other)?.is_zero())
    }

    pub fn intersect(&self, other: &Fms) -> Result<Fms> {
        let base = self.base.intersect(&other.base)?;
        let sub = self.sub.union(&other.sub).restrict_to(&base);
        let add: FiniteSet = self
            .add
            .iter()
            .filter(|&x| other.member(x))
            .chain(other.add.iter().filter(|&x| self.member(x)))
            .collect();
        Ok(Fms::new(base, add, sub))
    }

    /// Short form for traces: base plus correction sizes.
    pub fn summary(&self) -> String {
        format!("{}+{}-{}", self.base, self.add.len(), self.sub.len())
    }
}

impl fmt::Debug for Fms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Fms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base == Base::Empty {
            return write!(f, "{}", self.add);
        }
        write!(f, "{}", self.base)?;
        if !self.add.is_empty() {
            write!(f, " + {}", self.add)?;
        }
        if !self.sub.is_empty() {
            write!(f, " - {}", self.sub)?;
        }
        Ok(())
    }
}

pub struct FmsIter<'a> {
    set: &'a Fms,
    next: Elem,
}

impl Iterator for FmsIter<'_> {
    type Item = Elem;
    fn next(&mut self) -> Option<Elem> {
        let y = self.set.next_member_at_or_after(self.next)?;
        self.next = y + 1;
        Some(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: Elem = 400;

    /// Raw membership of `(base ∪ add) \ sub` with no normalization.
    fn raw_member(base: Base, add: &[Elem], sub: &[Elem], x: Elem) -> bool {
        (base.contains(x) || add.contains(&x)) && !sub.contains(&x)
    }

    fn fs(v: &[Elem]) -> FiniteSet {
        v.iter().copied().collect()
    }

    fn z(v: &[i64]) -> FiniteSet {
        v.iter().map(|&x| zigzag_encode(x)).collect()
    }

    #[test]
    fn zigzag_round_trip_and_order() {
        let order: Vec<i64> = (1..=7).map(zigzag_decode).collect();
        assert_eq!(order, vec![0, 1, -1, 2, -2, 3, -3]);
        for v in -500..500 {
            assert_eq!(zigzag_decode(zigzag_encode(v)), v);
        }
    }

    #[test]
    fn member_examples() {
        let s = Fms::new(Base::Full, FiniteSet::new(), fs(&[5]));
        assert!(!s.member(5));
        assert!(Fms::full().member(7));
        let t = Fms::new(Base::Suffix { from: 3 }, z(&[1]), z(&[4]));
        assert!(!t.member(zigzag_encode(4)));
        assert!(t.member(zigzag_encode(1)));
        for x in 1..H {
            let v = zigzag_decode(x);
            assert_eq!(t.member(x), v == 1 || (v >= 3 && v != 4), "x={x}");
        }
    }

    #[test]
    fn relate_examples() {
        let a = Fms::full().without(&fs(&[5]));
        let r = a.relate(&Fms::full()).unwrap();
        assert!(r.subset);
        assert_eq!(r.diff_card, Cardinality::Finite(0));
        assert_eq!(r.symdiff_card, Cardinality::Finite(1));

        let r = Fms::suffix(3).relate(&Fms::full()).unwrap();
        assert!(r.subset);
        assert_eq!(r.rev_diff_card, Cardinality::Infinite);

        let r = a.relate(&a).unwrap();
        assert!(r.equal);
        assert_eq!(r.symdiff_card, Cardinality::Finite(0));
    }

    #[test]
    fn modify_examples() {
        let s = Fms::full().modify(&FiniteSet::new(), &fs(&[1, 2]));
        assert_eq!(s.base(), Base::Full);
        assert_eq!(s.sub(), &fs(&[1, 2]));

        let s = Fms::full().without(&fs(&[5])).with(&fs(&[5]));
        assert_eq!(s, Fms::full());
        assert!(s.sub().is_empty());

        let s = Fms::suffix(3).modify(&z(&[1]), &z(&[3]));
        assert!(!s.member(zigzag_encode(3)));
        assert!(s.member(zigzag_encode(1)));
        assert!(s.member(zigzag_encode(4)));
    }

    #[test]
    fn enumerate_examples() {
        let s = Fms::full().without(&fs(&[2]));
        assert_eq!(s.enumerate(4), vec![1, 3, 4, 5]);
        assert!(s.enumerate(0).is_empty());
        let expect: Vec<Elem> = [0, 1, 2].iter().map(|&v| zigzag_encode(v)).collect();
        assert_eq!(Fms::suffix(0).enumerate(3), expect);
        assert_eq!(Fms::finite(fs(&[3, 9])).enumerate(10), vec![3, 9]);
    }

    #[test]
    fn suffix_normal_form_is_unique() {
        let a = Fms::new(Base::Suffix { from: 4 }, z(&[3]), FiniteSet::new());
        assert_eq!(a, Fms::suffix(3));
        let b = Fms::suffix(3).without(&z(&[3]));
        assert_eq!(b, Fms::suffix(4));
        let c = Fms::suffix(10).with(&z(&[0]));
        assert_eq!(c.base(), Base::Suffix { from: 0 });
        assert!(c.add().is_empty());
        assert_eq!(c.sub().len(), 9);
    }

    #[test]
    fn suffix_minus_prefix_stays_compact() {
        let s = Fms::suffix(-40_000).without(&FiniteSet::range(1, 20));
        assert_eq!(s.base(), Base::Suffix { from: -40_000 });
        assert_eq!(s.sub().runs().len(), 1);
        let t = Fms::suffix(5).without(&FiniteSet::range(1, 1_000));
        assert_eq!(t, Fms::suffix(501));
    }

    #[test]
    fn finite_set_algebra_matches_brute_force() {
        let a = fs(&[1, 2, 3, 7, 8, 20, 21, 22, 40]);
        let b = fs(&[2, 3, 4, 8, 9, 19, 20, 41]);
        let ba: std::collections::BTreeSet<Elem> = a.iter().collect();
        let bb: std::collections::BTreeSet<Elem> = b.iter().collect();
        assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), ba.union(&bb).copied().collect::<Vec<_>>());
        assert_eq!(
            a.intersection(&b).iter().collect::<Vec<_>>(),
            ba.intersection(&bb).copied().collect::<Vec<_>>()
        );
        assert_eq!(
            a.difference(&b).iter().collect::<Vec<_>>(),
            ba.difference(&bb).copied().collect::<Vec<_>>()
        );
        assert_eq!(a.count_in(3, 21), 5);
        assert_eq!(a.first_gap_at_or_after(1), 4);
        assert_eq!(a.next_at_or_after(9), Some(20));
    }

    #[test]
    fn base_closed_forms_match_brute_force() {
        let bases = [
            Base::Full,
            Base::Empty,
            Base::Suffix { from: -3 },
            Base::Suffix { from: 0 },
            Base::Suffix { from: 4 },
            Base::Multiples { of: 3 },
            Base::Parity { residue: 0 },
            Base::Parity { residue: 1 },
        ];
        for b in bases {
            for lo in 1..30 {
                for hi in lo..60 {
                    let brute = (lo..=hi).filter(|&x| b.contains(x)).count() as u64;
                    assert_eq!(b.count_in(lo, hi), brute, "{b} [{lo},{hi}]");
                    let m: Vec<Elem> = b.members_in(lo, hi).iter().collect();
                    let bm: Vec<Elem> = (lo..=hi).filter(|&x| b.contains(x)).collect();
                    assert_eq!(m, bm, "{b}");
                }
                let brute = if b == Base::Empty { None } else { (lo..).find(|&x| b.contains(x)) };
                assert_eq!(b.next_ge(lo), brute);
            }
        }
    }

    #[test]
    fn normal_form_agrees_with_raw_semantics() {
        let bases = [
            Base::Full,
            Base::Empty,
            Base::Suffix { from: 2 },
            Base::Suffix { from: -2 },
            Base::Multiples { of: 2 },
            Base::Parity { residue: 1 },
        ];
        let add = [1, 4, 5, 9, 30];
        let sub = [2, 4, 6, 7, 11];
        for b in bases {
            let s = Fms::new(b, fs(&add), fs(&sub));
            for x in 1..H {
                assert_eq!(s.member(x), raw_member(b, &add, &sub, x), "{b} x={x}");
            }
            let again = Fms::new(s.base(), s.add().clone(), s.sub().clone());
            assert_eq!(again, s);
        }
    }

    #[test]
    fn cross_family_relation_is_an_error() {
        let err = Fms::suffix(0).relate(&Fms::multiples(2)).unwrap_err();
        assert!(matches!(err, Error::UnknownBasePair { .. }));
    }

    #[test]
    fn serde_round_trip_normalizes() {
        let s = Fms::full().without(&fs(&[3, 4, 5, 9]));
        let txt = serde_json::to_string(&s).unwrap();
        let back: Fms = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
        let raw = r#"{"base":{"kind":"SUFFIX","from":4},"add":[[5,5]],"sub":[]}"#;
        let parsed: Fms = serde_json::from_str(raw).unwrap();
        assert_eq!(parsed, Fms::suffix(-2).without(&z(&[-1, 0, 1, 2, 3])));
    }
}
