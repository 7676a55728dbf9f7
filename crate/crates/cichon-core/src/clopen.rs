//! Canonical clopen subsets of Cantor space.
//!
//! A clopen set is stored as the unique canonical antichain of cylinder
//! stems: no stem extends another, and no two sibling stems are both
//! present. All Boolean algebra goes through a small pruned-tree form,
//! which keeps every operation exact.

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Canonical finite union of cylinders.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct ClopenSet {
    cyls: BTreeSet<BitString>,
}

/// Pruned-tree view used internally for the algebra.
#[derive(Clone, PartialEq, Eq)]
enum Trie {
    Empty,
    Full,
    Split(Box<Trie>, Box<Trie>),
}

impl Trie {
    fn split(zero: Trie, one: Trie) -> Trie {
        match (&zero, &one) {
            (Trie::Empty, Trie::Empty) => Trie::Empty,
            (Trie::Full, Trie::Full) => Trie::Full,
            _ => Trie::Split(Box::new(zero), Box::new(one)),
        }
    }

    fn insert(&mut self, bits: &[u8]) {
        if matches!(self, Trie::Full) {
            return;
        }
        match bits.split_first() {
            None => *self = Trie::Full,
            Some((&b, rest)) => {
                if matches!(self, Trie::Empty) {
                    *self = Trie::Split(Box::new(Trie::Empty), Box::new(Trie::Empty));
                }
                if let Trie::Split(zero, one) = self {
                    if b == 0 {
                        zero.insert(rest);
                    } else {
                        one.insert(rest);
                    }
                    if matches!(**zero, Trie::Full) && matches!(**one, Trie::Full) {
                        *self = Trie::Full;
                    }
                }
            }
        }
    }

    fn union(a: &Trie, b: &Trie) -> Trie {
        match (a, b) {
            (Trie::Full, _) | (_, Trie::Full) => Trie::Full,
            (Trie::Empty, x) | (x, Trie::Empty) => x.clone(),
            (Trie::Split(a0, a1), Trie::Split(b0, b1)) => {
                Trie::split(Trie::union(a0, b0), Trie::union(a1, b1))
            }
        }
    }

    fn intersect(a: &Trie, b: &Trie) -> Trie {
        match (a, b) {
            (Trie::Empty, _) | (_, Trie::Empty) => Trie::Empty,
            (Trie::Full, x) | (x, Trie::Full) => x.clone(),
            (Trie::Split(a0, a1), Trie::Split(b0, b1)) => {
                Trie::split(Trie::intersect(a0, b0), Trie::intersect(a1, b1))
            }
        }
    }

    fn complement(&self) -> Trie {
        match self {
            Trie::Empty => Trie::Full,
            Trie::Full => Trie::Empty,
            Trie::Split(zero, one) => Trie::split(zero.complement(), one.complement()),
        }
    }

    fn is_subset(a: &Trie, b: &Trie) -> bool {
        match (a, b) {
            (Trie::Empty, _) => true,
            (_, Trie::Full) => true,
            (Trie::Full, _) | (_, Trie::Empty) => false,
            (Trie::Split(a0, a1), Trie::Split(b0, b1)) => {
                Trie::is_subset(a0, b0) && Trie::is_subset(a1, b1)
            }
        }
    }

    fn collect(&self, prefix: &mut Vec<u8>, out: &mut BTreeSet<BitString>) {
        match self {
            Trie::Empty => {}
            Trie::Full => {
                out.insert(BitString::from_bits(prefix.clone()).expect("depth capped"));
            }
            Trie::Split(zero, one) => {
                prefix.push(0);
                zero.collect(prefix, out);
                prefix.pop();
                prefix.push(1);
                one.collect(prefix, out);
                prefix.pop();
            }
        }
    }
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet {
            cyls: BTreeSet::new(),
        }
    }

    pub fn full() -> Self {
        ClopenSet::from_cylinders([BitString::empty()])
    }

    /// One cylinder `[t]`.
    pub fn cylinder(t: BitString) -> Self {
        ClopenSet::from_cylinders([t])
    }

    /// Canonical form of an arbitrary union of cylinders.
    pub fn from_cylinders<I: IntoIterator<Item = BitString>>(cyls: I) -> Self {
        let mut trie = Trie::Empty;
        for t in cyls {
            trie.insert(t.bits());
        }
        Self::from_trie(&trie)
    }

    fn from_trie(trie: &Trie) -> Self {
        let mut out = BTreeSet::new();
        trie.collect(&mut Vec::new(), &mut out);
        ClopenSet { cyls: out }
    }

    fn to_trie(&self) -> Trie {
        let mut trie = Trie::Empty;
        for t in &self.cyls {
            trie.insert(t.bits());
        }
        trie
    }

    pub fn cylinders(&self) -> impl Iterator<Item = &BitString> {
        self.cyls.iter()
    }

    pub fn cylinder_count(&self) -> usize {
        self.cyls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cyls.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.cyls.len() == 1 && self.cyls.iter().next().unwrap().is_empty()
    }

    /// Maximum stem length (0 for the empty set and the full space).
    pub fn depth(&self) -> u32 {
        self.cyls.iter().map(|t| t.len() as u32).max().unwrap_or(0)
    }

    /// Exact product measure: sum of `2^{-|t|}` over the antichain.
    pub fn measure(&self) -> Dyadic {
        let mut acc = Dyadic::zero();
        for t in &self.cyls {
            acc = acc.add(&Dyadic::pow2_neg(t.len() as u32));
        }
        acc
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        ClopenSet::from_trie(&Trie::union(&self.to_trie(), &other.to_trie()))
    }

    pub fn intersect(&self, other: &ClopenSet) -> ClopenSet {
        ClopenSet::from_trie(&Trie::intersect(&self.to_trie(), &other.to_trie()))
    }

    pub fn complement(&self) -> ClopenSet {
        ClopenSet::from_trie(&self.to_trie().complement())
    }

    /// `other ⊆ self`, exactly.
    pub fn includes(&self, other: &ClopenSet) -> bool {
        Trie::is_subset(&other.to_trie(), &self.to_trie())
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a ClopenSet>>(sets: I) -> ClopenSet {
        let mut trie = Trie::Empty;
        for s in sets {
            for t in &s.cyls {
                trie.insert(t.bits());
            }
        }
        ClopenSet::from_trie(&trie)
    }

    /// Does `[t]` meet the set?
    pub fn meets_cylinder(&self, t: &BitString) -> bool {
        self.cyls.iter().any(|s| s.comparable(t))
    }

    /// Is `[t]` contained in the set? For a canonical antichain this is
    /// exactly "some stem is a prefix of `t`".
    pub fn contains_cylinder(&self, t: &BitString) -> bool {
        self.cyls.iter().any(|s| s.is_prefix_of(t))
    }

    /// Membership of the point determined by a finite prefix:
    /// `Some(true)` if `[x] ⊆ A`, `Some(false)` if `[x] ∩ A = ∅`,
    /// `None` if the prefix is too short to decide.
    pub fn contains_point_prefix(&self, x: &BitString) -> Option<bool> {
        if self.contains_cylinder(x) {
            return Some(true);
        }
        if !self.meets_cylinder(x) {
            return Some(false);
        }
        None
    }

    /// Coordinatewise XOR with the prefix of `x`; `|x|` must reach the depth.
    pub fn translate(&self, x: &BitString) -> Result<ClopenSet> {
        if (x.len() as u32) < self.depth() {
            return Err(Error::TranslationDepth {
                word: x.len(),
                depth: self.depth(),
            });
        }
        let cyls: Vec<BitString> = self
            .cyls
            .iter()
            .map(|t| t.xor_prefix(x))
            .collect::<Result<_>>()?;
        Ok(ClopenSet::from_cylinders(cyls))
    }

    /// Measure of `A ∩ [t]`.
    pub fn measure_within(&self, t: &BitString) -> Dyadic {
        self.intersect(&ClopenSet::cylinder(t.clone())).measure()
    }

    /// Meets every cylinder of length `d`.
    pub fn is_dense_at_depth(&self, d: u32) -> bool {
        self.complement().cyls.iter().all(|t| t.len() as u32 > d)
    }
}

/// Minimal-cylinder decomposition of an open set given by increasing clopen
/// stages: the canonical antichain of the final stage, in dictionary order.
/// A stem is emitted only once no proper prefix of it is known to be
/// covered, so extending the stage list refines rather than contradicts
/// earlier output.
pub fn tilde_decomposition(stages: &[ClopenSet]) -> Result<Vec<BitString>> {
    for i in 1..stages.len() {
        if !stages[i].includes(&stages[i - 1]) {
            return Err(Error::StagesNotIncreasing(i));
        }
    }
    let last = stages.last().cloned().unwrap_or_else(ClopenSet::empty);
    Ok(last.cylinders().cloned().collect())
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.cyls.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t:?}")?;
        }
        write!(f, "}}")
    }
}

impl<'de> Deserialize<'de> for ClopenSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            cyls: Vec<BitString>,
        }
        let raw = Raw::deserialize(d)?;
        Ok(ClopenSet::from_cylinders(raw.cyls))
    }
}
