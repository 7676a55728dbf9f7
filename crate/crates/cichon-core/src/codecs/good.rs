//! Good families of clopen sets: indexed families `S^n_m` that meet the
//! basic set `U_n` and enter every dense open set.
//!
//! Two families are implemented. The interval-cylinder family fixes a
//! word on a coordinate interval `[n, k)` and is the workhorse for meager
//! codes: all of its operations have closed forms at any depth. The
//! intersecting family realizes the stronger property that any `<= 2^n`
//! members of the `n`-th layer meet; its members are unions along
//! admissible chains through the global clopen enumeration and are only
//! tractable for small `n`, so the whole construction is budgeted.

use crate::bits::{basis_cylinder, BitString};
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::index::{global_enumeration, ClopenExpr};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoodFamilyKind {
    Intervals,
    Intersecting,
}

#[derive(Debug, Clone)]
pub enum GoodFamily {
    Intervals,
    Intersecting(Arc<IntersectingFamily>),
}

impl GoodFamily {
    pub fn kind(&self) -> GoodFamilyKind {
        match self {
            GoodFamily::Intervals => GoodFamilyKind::Intervals,
            GoodFamily::Intersecting(_) => GoodFamilyKind::Intersecting,
        }
    }

    /// The interval member `(n, m) -> (k, s)`: the `m`-th word, ordered by
    /// (k, lex of s), placed on the coordinate interval `[n, k)`.
    pub fn interval_pattern(n: u32, m: u64) -> (u64, BitString) {
        // Words of length i = k - n come in blocks of 2^i, i = 1, 2, ...
        let mut i = 1u32;
        let mut seen = 0u64;
        loop {
            let block = 1u64 << i;
            if m < seen + block {
                let offset = m - seen;
                let s = BitString::from_value(offset as u128, i as usize).expect("block offset");
                return (n as u64 + i as u64, s);
            }
            seen += block;
            i += 1;
        }
    }

    /// Member as a lazy expression (pattern form for intervals).
    pub fn member_expr(&self, n: u32, m: u64) -> Result<ClopenExpr> {
        match self {
            GoodFamily::Intervals => {
                let (_k, s) = Self::interval_pattern(n, m);
                Ok(ClopenExpr::Pattern {
                    start: n as u64,
                    bits: s,
                })
            }
            GoodFamily::Intersecting(fam) => {
                let set = fam.member(n, m)?;
                Ok(ClopenExpr::Cyls(set.cylinders().cloned().collect()))
            }
        }
    }

    /// Materialized member; exponential in `n` for the interval family.
    pub fn member_set(&self, n: u32, m: u64, budget: u64) -> Result<ClopenSet> {
        self.member_expr(n, m)?.materialize(budget)
    }

    /// Does `S^n_m` meet the clopen set `c`? Closed form for intervals.
    pub fn member_meets(&self, n: u32, m: u64, c: &ClopenSet) -> Result<bool> {
        match self {
            GoodFamily::Intervals => {
                let (_k, s) = Self::interval_pattern(n, m);
                Ok(c.cylinders().any(|t| pattern_meets_cylinder(n as u64, &s, t)))
            }
            GoodFamily::Intersecting(fam) => Ok(!fam.member(n, m)?.intersect(c).is_empty()),
        }
    }

    /// Is `S^n_m` contained in the clopen set `open`?
    pub fn member_inside(&self, n: u32, m: u64, open: &ClopenSet) -> Result<bool> {
        match self {
            GoodFamily::Intervals => {
                let (_k, s) = Self::interval_pattern(n, m);
                // S ⊆ open  iff  S misses the complement.
                let comp = open.complement();
                let hit = comp
                    .cylinders()
                    .any(|t| pattern_meets_cylinder(n as u64, &s, t));
                Ok(!hit)
            }
            GoodFamily::Intersecting(fam) => Ok(open.includes(&fam.member(n, m)?)),
        }
    }

    /// Tri-state point membership.
    pub fn point_in_member(&self, n: u32, m: u64, x: &BitString) -> Result<Option<bool>> {
        Ok(self.member_expr(n, m)?.contains_point_prefix(x))
    }

    /// Search the least member index disjoint from the obstruction.
    pub fn first_member_disjoint(
        &self,
        n: u32,
        obstruction: &ClopenSet,
        budget: u64,
    ) -> Result<Option<u64>> {
        let count = self.member_count(n);
        for m in 0..budget.min(count.unwrap_or(u64::MAX)) {
            if !self.member_meets(n, m, obstruction)? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    /// Search the least member index contained in the open set.
    pub fn first_member_inside(
        &self,
        n: u32,
        open: &ClopenSet,
        budget: u64,
    ) -> Result<Option<u64>> {
        let count = self.member_count(n);
        for m in 0..budget.min(count.unwrap_or(u64::MAX)) {
            if self.member_inside(n, m, open)? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    /// Number of enumerated members at layer `n`, when finite.
    pub fn member_count(&self, n: u32) -> Option<u64> {
        match self {
            GoodFamily::Intervals => None,
            GoodFamily::Intersecting(fam) => Some(
                fam.chains
                    .get(n as usize)
                    .map(|c| c.len() as u64)
                    .unwrap_or(0),
            ),
        }
    }

    /// Goodness condition (1): `S^n_m ∩ U_n != ∅`.
    pub fn meets_basis(&self, n: u32, m: u64) -> Result<bool> {
        let u = ClopenSet::cylinder(basis_cylinder(n as u64));
        self.member_meets(n, m, &u)
    }
}

/// Does the pattern set `{x : x agrees with s on [start, start+|s|)}` meet
/// the cylinder `[t]`?
fn pattern_meets_cylinder(start: u64, s: &BitString, t: &BitString) -> bool {
    let start = start as usize;
    for i in start..(start + s.len()).min(t.len()) {
        if t.bit(i) != s.bit(i - start) {
            return false;
        }
    }
    true
}

/// Budgets controlling construction of the intersecting family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntersectingBudget {
    /// Largest layer `n` built; chain length at layer `n` is `2^n + 1`.
    pub n_cap: u32,
    /// Chains enumerated per layer.
    pub chains_per_layer: usize,
    /// How far past the previous index each chain step scans.
    pub scan: u64,
    /// Cap on the closure of basic intersections per layer.
    pub closure_cap: usize,
}

impl Default for IntersectingBudget {
    fn default() -> Self {
        IntersectingBudget {
            n_cap: 3,
            chains_per_layer: 10,
            scan: 768,
            closure_cap: 2048,
        }
    }
}

/// The family of Lemma-style intersecting layers: members of layer `n` are
/// unions `∪_{i<=2^n} C_{m_i}` along chains with `m_{i+1}` admissible after
/// `m_i`, where admissibility of `l` after `k` demands that `C_l` meet
/// every nonempty intersection of `U_n` with sets among `C_0..C_k`.
#[derive(Debug)]
pub struct IntersectingFamily {
    pub budget: IntersectingBudget,
    /// Valid chains per layer, in lexicographic order.
    pub chains: Vec<Vec<Vec<u64>>>,
    /// Materialized member sets, aligned with `chains`.
    pub members: Vec<Vec<ClopenSet>>,
}

/// Closure of `{U_n ∩ ∩_{i∈I} C_i : I ⊆ {0..k}}`, grown index by index.
struct IntersectionClosure {
    layer_basis: ClopenSet,
    /// entries[..boundaries[k]] is the closure after folding C_0..C_{k-1}.
    entries: Vec<ClopenSet>,
    boundaries: Vec<usize>,
    cap: usize,
    decoded: Vec<ClopenSet>,
}

impl IntersectionClosure {
    fn new(layer_basis: ClopenSet, cap: usize) -> Self {
        IntersectionClosure {
            entries: vec![layer_basis.clone()],
            layer_basis,
            boundaries: vec![1],
            cap,
            decoded: Vec::new(),
        }
    }

    fn global(&mut self, l: u64) -> &ClopenSet {
        while self.decoded.len() as u64 <= l {
            self.decoded.push(decode_global(self.decoded.len() as u64));
        }
        &self.decoded[l as usize]
    }

    /// Ensure the closure covers subsets of `{0..k}`; errors out at the cap.
    fn grow_to(&mut self, k: u64) -> Result<()> {
        let _ = &self.layer_basis;
        while (self.boundaries.len() as u64) <= k {
            let next_index = self.boundaries.len() as u64 - 1;
            let c = self.global(next_index).clone();
            let upto = *self.boundaries.last().unwrap();
            let mut new_entries = Vec::new();
            for e in &self.entries[..upto] {
                let meet = e.intersect(&c);
                if !self.entries[..upto].contains(&meet)
                    && !new_entries.contains(&meet)
                {
                    new_entries.push(meet);
                }
            }
            self.entries.extend(new_entries);
            if self.entries.len() > self.cap {
                return Err(Error::SearchBound(format!(
                    "intersection closure exceeded {} sets",
                    self.cap
                )));
            }
            self.boundaries.push(self.entries.len());
        }
        Ok(())
    }

    /// Is `l` admissible after `k`: does `C_l` meet every nonempty closure
    /// entry over `{0..k}`?
    fn admissible(&mut self, k: u64, l: u64) -> Result<bool> {
        self.grow_to(k + 1)?;
        let upto = self.boundaries[(k + 1) as usize];
        let c = self.global(l).clone();
        if c.is_empty() {
            return Ok(false);
        }
        for e in &self.entries[..upto] {
            if !e.is_empty() && e.intersect(&c).is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn decode_global(l: u64) -> ClopenSet {
    global_enumeration()
        .member(&BigUint::from(l))
        .unwrap_or_else(|_| ClopenSet::empty())
}

impl IntersectingFamily {
    pub fn build(budget: IntersectingBudget) -> Arc<Self> {
        let mut chains = Vec::new();
        let mut members = Vec::new();
        for n in 0..=budget.n_cap {
            let (c, m) = Self::build_layer(n, &budget);
            chains.push(c);
            members.push(m);
        }
        Arc::new(IntersectingFamily {
            budget,
            chains,
            members,
        })
    }

    fn build_layer(n: u32, budget: &IntersectingBudget) -> (Vec<Vec<u64>>, Vec<ClopenSet>) {
        struct Search<'a> {
            closure: IntersectionClosure,
            budget: &'a IntersectingBudget,
            chains: Vec<Vec<u64>>,
            members: Vec<ClopenSet>,
            distinct: Vec<ClopenSet>,
            examined: u64,
        }
        impl Search<'_> {
            fn done(&self) -> bool {
                self.distinct.len() >= self.budget.chains_per_layer
                    || self.examined > 64 * self.budget.scan
            }

            // Lexicographic depth-first enumeration of valid chains until
            // enough distinct member sets have appeared. A subtree that
            // completes chains without producing any fresh member makes
            // its parent give up after two such children, so the search
            // varies early coordinates instead of grinding through suffix
            // permutations of the same union. The root scans all heads.
            // Returns (completed_any, found_fresh).
            fn dfs(&mut self, stack: &mut Vec<u64>, len: usize) -> (bool, bool) {
                if self.done() {
                    return (false, false);
                }
                if stack.len() == len {
                    let member = ClopenSet::union_all(
                        stack
                            .iter()
                            .map(|&l| self.closure.global(l).clone())
                            .collect::<Vec<_>>()
                            .iter(),
                    );
                    let fresh = !self.distinct.contains(&member);
                    if fresh {
                        self.distinct.push(member.clone());
                        self.chains.push(stack.clone());
                        self.members.push(member);
                    }
                    return (true, fresh);
                }
                let from = stack.last().map(|&k| k + 1).unwrap_or(0);
                let until = from + self.budget.scan;
                let at_root = stack.is_empty();
                let mut completed = false;
                let mut fresh = false;
                let mut dup_children = 0;
                for l in from..until {
                    if self.done() {
                        break;
                    }
                    self.examined += 1;
                    let ok = match stack.last() {
                        None => true,
                        Some(&k) => self.closure.admissible(k, l).unwrap_or(false),
                    };
                    if ok {
                        stack.push(l);
                        let (c, f) = self.dfs(stack, len);
                        stack.pop();
                        completed |= c;
                        fresh |= f;
                        if c && !f {
                            dup_children += 1;
                            if !at_root && dup_children >= 2 {
                                break;
                            }
                        }
                    }
                }
                (completed, fresh)
            }
        }
        let len = (1usize << n) + 1;
        let basis = ClopenSet::cylinder(basis_cylinder(n as u64));
        let mut search = Search {
            closure: IntersectionClosure::new(basis, budget.closure_cap),
            budget,
            chains: Vec::new(),
            members: Vec::new(),
            distinct: Vec::new(),
            examined: 0,
        };
        let mut stack = Vec::new();
        search.dfs(&mut stack, len);
        (search.chains, search.members)
    }

    pub fn member(&self, n: u32, m: u64) -> Result<ClopenSet> {
        self.members
            .get(n as usize)
            .and_then(|layer| layer.get(m as usize))
            .cloned()
            .ok_or(Error::FamilyIndexRange(m))
    }

    pub fn chain(&self, n: u32, m: u64) -> Option<&[u64]> {
        self.chains
            .get(n as usize)
            .and_then(|layer| layer.get(m as usize))
            .map(|c| c.as_slice())
    }

    /// Validate an explicit chain against the admissibility relation,
    /// reporting the first failing position.
    pub fn validate_chain(&self, n: u32, chain: &[u64]) -> Result<()> {
        let expect = (1usize << n) + 1;
        if chain.len() != expect {
            return Err(Error::Precondition(format!(
                "chain length {} != 2^{n}+1 = {expect}",
                chain.len()
            )));
        }
        let basis = ClopenSet::cylinder(basis_cylinder(n as u64));
        let mut closure = IntersectionClosure::new(basis, self.budget.closure_cap);
        for i in 1..chain.len() {
            if chain[i] <= chain[i - 1]
                || !closure.admissible(chain[i - 1], chain[i]).unwrap_or(false)
            {
                return Err(Error::InvalidChain { position: i });
            }
        }
        Ok(())
    }

    /// The union along a validated chain.
    pub fn member_of_chain(&self, n: u32, chain: &[u64]) -> Result<ClopenSet> {
        self.validate_chain(n, chain)?;
        Ok(ClopenSet::union_all(
            chain
                .iter()
                .map(|&l| decode_global(l))
                .collect::<Vec<_>>()
                .iter(),
        ))
    }

    /// Distinct member sets of layer `n`, in enumeration order.
    pub fn distinct_members(&self, n: u32) -> Vec<ClopenSet> {
        let mut seen = Vec::new();
        if let Some(layer) = self.members.get(n as usize) {
            for s in layer {
                if !seen.contains(s) {
                    seen.push(s.clone());
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn interval_pattern_order() {
        // (0,0): k=1, s="0", i.e. {x : x(0)=0}.
        let (k, s) = GoodFamily::interval_pattern(0, 0);
        assert_eq!((k, s), (1, bs("0")));
        let (k, s) = GoodFamily::interval_pattern(0, 1);
        assert_eq!((k, s), (1, bs("1")));
        let (k, s) = GoodFamily::interval_pattern(0, 2);
        assert_eq!((k, s), (2, bs("00")));
        let (k, s) = GoodFamily::interval_pattern(3, 6);
        assert_eq!((k, s), (6, bs("000")));
        let (k, s) = GoodFamily::interval_pattern(3, 2);
        assert_eq!((k, s), (5, bs("00")));
        let fam = GoodFamily::Intervals;
        assert_eq!(
            fam.member_set(0, 0, 1 << 10).unwrap(),
            ClopenSet::cylinder(bs("0"))
        );
    }

    #[test]
    fn interval_family_is_good() {
        let fam = GoodFamily::Intervals;
        // gooddef (1): members meet the basic sets.
        for n in 0..6u32 {
            for m in 0..50u64 {
                assert!(fam.meets_basis(n, m).unwrap(), "S^{n}_{m} misses U_{n}");
            }
        }
        // gooddef (2) for dense open sets of the kind the codec produces:
        // unions of interval members on layers at or above n. A member of
        // layer n inside the union always exists because the layer-j term
        // leaves coordinates below j free.
        for n in 0..4u32 {
            let parts: Vec<ClopenSet> = (n..n + 3)
                .map(|j| fam.member_set(j, (j + 2) as u64, 1 << 16).unwrap())
                .collect();
            let dense = ClopenSet::union_all(parts.iter());
            let m = fam.first_member_inside(n, &dense, 1 << 12).unwrap();
            assert!(m.is_some(), "no member of layer {n} inside dense union");
        }
        // An obstruction supported entirely below coordinate n defeats
        // layer n: no pattern on [n, k) can avoid it. The density clause
        // is family-relative, not absolute.
        let dense = ClopenSet::from_cylinders(
            ["000", "01", "10", "110"].iter().map(|s| s.parse().unwrap()),
        );
        assert!(dense.is_dense_at_depth(2));
        assert!(fam.first_member_inside(1, &dense, 1 << 12).unwrap().is_some());
        assert!(fam.first_member_inside(3, &dense, 1 << 12).unwrap().is_none());
    }

    #[test]
    fn interval_member_meets_matches_materialization() {
        let fam = GoodFamily::Intervals;
        let c = ClopenSet::from_cylinders(["0110", "101"].iter().map(|s| s.parse().unwrap()));
        for n in 0..4u32 {
            for m in 0..30u64 {
                let lazy = fam.member_meets(n, m, &c).unwrap();
                let full = !fam.member_set(n, m, 1 << 16).unwrap().intersect(&c).is_empty();
                assert_eq!(lazy, full, "mismatch at ({n},{m})");
            }
        }
    }

    #[test]
    fn intersecting_layers_intersect() {
        let fam = IntersectingFamily::build(IntersectingBudget {
            n_cap: 2,
            chains_per_layer: 8,
            ..Default::default()
        });
        for n in 0..=2u32 {
            let members = fam.distinct_members(n);
            assert!(!members.is_empty(), "no members at layer {n}");
            // Any <= 2^n members intersect.
            let cap = 1usize << n;
            let idx: Vec<usize> = (0..members.len()).collect();
            for subset in subsets_up_to(&idx, cap) {
                if subset.is_empty() {
                    continue;
                }
                let mut meet = members[subset[0]].clone();
                for &j in &subset[1..] {
                    meet = meet.intersect(&members[j]);
                }
                assert!(
                    !meet.is_empty(),
                    "members {subset:?} of layer {n} have empty intersection"
                );
            }
        }
    }

    #[test]
    fn chain_validation() {
        let fam = IntersectingFamily::build(IntersectingBudget {
            n_cap: 1,
            chains_per_layer: 4,
            ..Default::default()
        });
        let chain = fam.chain(0, 0).unwrap().to_vec();
        assert!(fam.validate_chain(0, &chain).is_ok());
        let mut bad = chain.clone();
        bad[1] = bad[0]; // not increasing
        assert!(matches!(
            fam.validate_chain(0, &bad),
            Err(Error::InvalidChain { position: 1 })
        ));
        assert!(fam.validate_chain(0, &chain[..1]).is_err());
    }

    fn subsets_up_to(items: &[usize], cap: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &x in items {
            let mut more = Vec::new();
            for s in &out {
                if s.len() < cap {
                    let mut t = s.clone();
                    t.push(x);
                    more.push(t);
                }
            }
            out.extend(more);
        }
        out
    }
}
