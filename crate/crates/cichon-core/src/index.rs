//! Indexed clopen families.
//!
//! `ClopenFamily { level: n }` is the family `C^n_m`: a total map from
//! indices `m` onto clopen sets of measure at most `2^-n`, surjective onto
//! all canonical sets satisfying the bound. An index is a self-delimiting
//! description read from the binary expansion of `m`: either an explicit
//! canonical cylinder list, a coordinate-pattern set (all points matching a
//! fixed word on a fixed coordinate interval), or a union of descriptions.
//! Index size therefore tracks the structural size of the set rather than
//! its leaf count, which keeps deep-but-thin and shallow-but-wide sets
//! equally cheap to name.
//!
//! `index_of` is the canonical (cylinder-list) section of the decoder:
//! `member(index_of(A)) == A` for every admissible `A`, and `index_of` is
//! injective. Distinct indices may decode to the same set; any index whose
//! description is malformed or whose measure cannot be certified below the
//! level bound decodes to the empty set, so `member` is total.

use crate::bits::BitString;
use crate::clopen::ClopenSet;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::Zero;

/// Cap on gamma-coded integers inside index descriptions.
const GAMMA_CAP: u64 = 1 << 40;

/// Default cylinder budget when materializing a description.
pub const MATERIALIZE_BUDGET: u64 = 1 << 22;

/// Budget used when validating the measure of a decoded description.
const VALIDATE_BUDGET: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClopenExpr {
    Empty,
    Cyls(Vec<BitString>),
    Pattern { start: u64, bits: BitString },
    Union(Box<ClopenExpr>, Box<ClopenExpr>),
}

struct BitReader<'a> {
    bits: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn bit(&mut self) -> Option<u8> {
        let b = self.bits.get(self.pos).copied();
        self.pos += 1;
        b
    }

    /// Elias gamma code for integers >= 1.
    fn gamma(&mut self) -> Option<u64> {
        let mut zeros = 0usize;
        loop {
            match self.bit()? {
                0 => zeros += 1,
                _ => break,
            }
            if zeros > 40 {
                return None;
            }
        }
        let mut v: u64 = 1;
        for _ in 0..zeros {
            v = (v << 1) | self.bit()? as u64;
        }
        (v < GAMMA_CAP).then_some(v)
    }

    fn word(&mut self, len: usize) -> Option<BitString> {
        let mut bits = Vec::with_capacity(len);
        for _ in 0..len {
            bits.push(self.bit()?);
        }
        BitString::from_bits(bits).ok()
    }
}

fn write_gamma(out: &mut Vec<u8>, v: u64) {
    debug_assert!(v >= 1);
    let len = 64 - v.leading_zeros() as usize;
    for _ in 0..len - 1 {
        out.push(0);
    }
    for i in (0..len).rev() {
        out.push(((v >> i) & 1) as u8);
    }
}

impl ClopenExpr {
    fn parse_expr(r: &mut BitReader) -> Option<ClopenExpr> {
        let tag = (r.bit()?, r.bit()?);
        match tag {
            (0, 0) => {
                let count = r.gamma()?;
                let mut cyls = Vec::with_capacity(count.min(1 << 16) as usize);
                for _ in 0..count {
                    let len = r.gamma()? - 1;
                    cyls.push(r.word(len as usize)?);
                }
                Some(ClopenExpr::Cyls(cyls))
            }
            (0, 1) => {
                let start = r.gamma()? - 1;
                let len = r.gamma()?;
                let bits = r.word(len as usize)?;
                Some(ClopenExpr::Pattern { start, bits })
            }
            (1, 0) => {
                let a = Self::parse_expr(r)?;
                let b = Self::parse_expr(r)?;
                Some(ClopenExpr::Union(Box::new(a), Box::new(b)))
            }
            _ => None,
        }
    }

    /// Total decoder; malformed streams yield `None`.
    pub fn parse(m: &BigUint) -> Option<ClopenExpr> {
        if m.is_zero() {
            return Some(ClopenExpr::Empty);
        }
        let digits = m.to_radix_be(2);
        let mut r = BitReader {
            bits: &digits[1..],
            pos: 0,
        };
        let e = Self::parse_expr(&mut r)?;
        (r.pos == r.bits.len()).then_some(e)
    }

    fn emit(&self, out: &mut Vec<u8>) {
        match self {
            ClopenExpr::Empty => unreachable!("the empty set is index 0, never a stream"),
            ClopenExpr::Cyls(cyls) => {
                out.push(0);
                out.push(0);
                write_gamma(out, cyls.len() as u64);
                for t in cyls {
                    write_gamma(out, t.len() as u64 + 1);
                    out.extend_from_slice(t.bits());
                }
            }
            ClopenExpr::Pattern { start, bits } => {
                out.push(0);
                out.push(1);
                write_gamma(out, start + 1);
                write_gamma(out, bits.len() as u64);
                out.extend_from_slice(bits.bits());
            }
            ClopenExpr::Union(a, b) => {
                out.push(1);
                out.push(0);
                a.emit(out);
                b.emit(out);
            }
        }
    }

    pub fn to_index(&self) -> BigUint {
        if matches!(self, ClopenExpr::Empty) {
            return BigUint::zero();
        }
        let mut digits = vec![1u8];
        self.emit(&mut digits);
        BigUint::from_radix_be(&digits, 2).expect("binary digits")
    }

    /// Largest coordinate the description constrains.
    pub fn max_depth(&self) -> u64 {
        match self {
            ClopenExpr::Empty => 0,
            ClopenExpr::Cyls(cyls) => cyls.iter().map(|t| t.len() as u64).max().unwrap_or(0),
            ClopenExpr::Pattern { start, bits } => start + bits.len() as u64,
            ClopenExpr::Union(a, b) => a.max_depth().max(b.max_depth()),
        }
    }

    /// Number of cylinders a materialization would produce (may overshoot
    /// the canonical count; used for budgeting).
    fn cylinder_cost(&self) -> u64 {
        match self {
            ClopenExpr::Empty => 0,
            ClopenExpr::Cyls(cyls) => cyls.len() as u64,
            ClopenExpr::Pattern { start, .. } => 1u64.checked_shl(*start as u32).unwrap_or(u64::MAX),
            ClopenExpr::Union(a, b) => a.cylinder_cost().saturating_add(b.cylinder_cost()),
        }
    }

    pub fn materialize(&self, budget: u64) -> Result<ClopenSet> {
        let cost = self.cylinder_cost();
        if cost > budget {
            return Err(Error::MaterializeBudget {
                cylinders: cost,
                cap: budget,
            });
        }
        let mut cyls = Vec::new();
        self.collect_cyls(&mut cyls)?;
        Ok(ClopenSet::from_cylinders(cyls))
    }

    fn collect_cyls(&self, out: &mut Vec<BitString>) -> Result<()> {
        match self {
            ClopenExpr::Empty => {}
            ClopenExpr::Cyls(cyls) => out.extend(cyls.iter().cloned()),
            ClopenExpr::Pattern { start, bits } => {
                for v in 0..(1u128 << *start) {
                    let prefix = BitString::from_value(v, *start as usize)?;
                    out.push(prefix.concat(bits)?);
                }
            }
            ClopenExpr::Union(a, b) => {
                a.collect_cyls(out)?;
                b.collect_cyls(out)?;
            }
        }
        Ok(())
    }

    /// Exact measure when cheap, otherwise a subadditive upper bound.
    /// The flag reports exactness.
    pub fn measure_bound(&self) -> (Dyadic, bool) {
        match self {
            ClopenExpr::Empty => (Dyadic::zero(), true),
            ClopenExpr::Cyls(_) | ClopenExpr::Pattern { .. } | ClopenExpr::Union(..) => {
                if let Ok(set) = self.materialize(VALIDATE_BUDGET) {
                    return (set.measure(), true);
                }
                (self.measure_upper(), false)
            }
        }
    }

    fn measure_upper(&self) -> Dyadic {
        match self {
            ClopenExpr::Empty => Dyadic::zero(),
            ClopenExpr::Cyls(cyls) => {
                let mut acc = Dyadic::zero();
                for t in cyls {
                    acc = acc.add(&Dyadic::pow2_neg(t.len() as u32));
                }
                acc
            }
            ClopenExpr::Pattern { bits, .. } => Dyadic::pow2_neg(bits.len() as u32),
            ClopenExpr::Union(a, b) => a.measure_upper().add(&b.measure_upper()),
        }
    }

    /// Exact nonemptiness of the intersection with a clopen set, without
    /// materializing.
    pub fn meets_clopen(&self, c: &ClopenSet) -> bool {
        match self {
            ClopenExpr::Empty => false,
            ClopenExpr::Cyls(cyls) => cyls.iter().any(|t| c.meets_cylinder(t)),
            ClopenExpr::Pattern { start, bits } => c.cylinders().any(|t| {
                let start = *start as usize;
                (start..(start + bits.len()).min(t.len()))
                    .all(|i| t.bit(i) == bits.bit(i - start))
            }),
            ClopenExpr::Union(a, b) => a.meets_clopen(c) || b.meets_clopen(c),
        }
    }

    /// Flatten into a union of coordinate patterns (a cylinder is a
    /// pattern anchored at zero).
    pub fn flatten_patterns(&self, out: &mut Vec<(u64, BitString)>) {
        match self {
            ClopenExpr::Empty => {}
            ClopenExpr::Cyls(cyls) => {
                for t in cyls {
                    out.push((0, t.clone()));
                }
            }
            ClopenExpr::Pattern { start, bits } => out.push((*start, bits.clone())),
            ClopenExpr::Union(a, b) => {
                a.flatten_patterns(out);
                b.flatten_patterns(out);
            }
        }
    }

    /// Tri-state membership of the point named by a finite prefix.
    pub fn contains_point_prefix(&self, x: &BitString) -> Option<bool> {
        match self {
            ClopenExpr::Empty => Some(false),
            ClopenExpr::Cyls(cyls) => {
                if cyls.iter().any(|t| t.is_prefix_of(x)) {
                    return Some(true);
                }
                if !cyls.iter().any(|t| t.comparable(x)) {
                    return Some(false);
                }
                None
            }
            ClopenExpr::Pattern { start, bits } => {
                let start = *start as usize;
                let end = start + bits.len();
                for i in start..end.min(x.len()) {
                    if x.bit(i) != bits.bit(i - start) {
                        return Some(false);
                    }
                }
                (x.len() >= end).then_some(true)
            }
            ClopenExpr::Union(a, b) => {
                match (a.contains_point_prefix(x), b.contains_point_prefix(x)) {
                    (Some(true), _) | (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                }
            }
        }
    }
}

/// The indexed family `{C^n_m : m}` at a fixed level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClopenFamily {
    pub level: u32,
}

impl ClopenFamily {
    pub fn new(level: u32) -> Self {
        ClopenFamily { level }
    }

    /// Parse and validate an index: measure must be certified `<= 2^-level`.
    pub fn expr(&self, m: &BigUint) -> Option<ClopenExpr> {
        let e = ClopenExpr::parse(m)?;
        let (mu, _exact) = e.measure_bound();
        mu.le_pow2_neg(self.level).then_some(e)
    }

    /// Total member map; indices failing validation denote the empty set.
    pub fn member(&self, m: &BigUint) -> Result<ClopenSet> {
        match self.expr(m) {
            None => Ok(ClopenSet::empty()),
            Some(e) => e.materialize(MATERIALIZE_BUDGET),
        }
    }

    /// Tri-state point membership without materializing.
    pub fn member_contains(&self, m: &BigUint, x: &BitString) -> Option<bool> {
        match self.expr(m) {
            None => Some(false),
            Some(e) => e.contains_point_prefix(x),
        }
    }

    /// Canonical index of a set: the cylinder-list description. Injective,
    /// and a section of `member`.
    pub fn index_of(&self, set: &ClopenSet) -> Result<BigUint> {
        if !set.measure().le_pow2_neg(self.level) {
            return Err(Error::MeasureExceedsLevel { level: self.level });
        }
        if set.is_empty() {
            return Ok(BigUint::zero());
        }
        let e = ClopenExpr::Cyls(set.cylinders().cloned().collect());
        Ok(e.to_index())
    }

    /// Index of the pattern set `{x : x restricted to [start, start+|bits|) = bits}`.
    pub fn index_of_pattern(&self, start: u64, bits: BitString) -> Result<BigUint> {
        if (bits.len() as u32) < self.level {
            return Err(Error::MeasureExceedsLevel { level: self.level });
        }
        Ok(ClopenExpr::Pattern { start, bits }.to_index())
    }

    /// Index describing the union of already-indexed members. Fails if the
    /// union's measure cannot be certified below the level bound.
    pub fn index_union(&self, parts: &[BigUint]) -> Result<BigUint> {
        let mut exprs = Vec::new();
        for m in parts {
            match self.expr(m) {
                None => {}
                Some(ClopenExpr::Empty) => {}
                Some(e) => exprs.push(e),
            }
        }
        let Some(mut acc) = exprs.pop() else {
            return Ok(BigUint::zero());
        };
        while let Some(e) = exprs.pop() {
            acc = ClopenExpr::Union(Box::new(e), Box::new(acc));
        }
        let (mu, _exact) = acc.measure_bound();
        if !mu.le_pow2_neg(self.level) {
            return Err(Error::MeasureExceedsLevel { level: self.level });
        }
        Ok(acc.to_index())
    }

    /// Enumerate `(m, C^n_m)` for `m = 0, 1, 2, ...`.
    pub fn enumerate(&self, take: u64) -> impl Iterator<Item = (u64, ClopenSet)> + '_ {
        let fam = *self;
        (0..take).map(move |m| {
            let set = fam
                .member(&BigUint::from(m))
                .unwrap_or_else(|_| ClopenSet::empty());
            (m, set)
        })
    }
}

/// The fixed enumeration of all clopen sets (no measure constraint).
pub fn global_enumeration() -> ClopenFamily {
    ClopenFamily::new(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(cyls: &[&str]) -> ClopenSet {
        ClopenSet::from_cylinders(cyls.iter().map(|s| s.parse().unwrap()))
    }

    #[test]
    fn empty_set_is_index_zero() {
        let fam = ClopenFamily::new(1);
        assert_eq!(fam.member(&BigUint::zero()).unwrap(), ClopenSet::empty());
        assert_eq!(fam.index_of(&ClopenSet::empty()).unwrap(), BigUint::zero());
    }

    #[test]
    fn member_is_total_and_respects_level() {
        let fam = ClopenFamily::new(3);
        for m in 0u64..100 {
            let c = fam.member(&BigUint::from(m)).unwrap();
            assert!(
                c.measure().le_pow2_neg(3),
                "member({m}) = {c:?} has measure above 1/8"
            );
        }
    }

    #[test]
    fn index_round_trip() {
        let fam = ClopenFamily::new(1);
        for s in [
            set(&["0"]),
            set(&["01", "10"]),
            set(&["010", "0111", "10"]),
            ClopenSet::empty(),
        ] {
            if !s.measure().le_pow2_neg(1) {
                continue;
            }
            let m = fam.index_of(&s).unwrap();
            assert_eq!(fam.member(&m).unwrap(), s, "round trip failed for {s:?}");
        }
        // Level 0 admits everything, including the full space.
        let all = global_enumeration();
        let m = all.index_of(&ClopenSet::full()).unwrap();
        assert_eq!(all.member(&m).unwrap(), ClopenSet::full());
    }

    #[test]
    fn index_of_is_injective_on_small_sweep() {
        // Canonical indices of distinct sets are distinct; additionally the
        // decoder is a retraction of the encoder on every admissible set of
        // depth <= 3.
        let fam = ClopenFamily::new(2);
        let mut seen = std::collections::BTreeMap::new();
        for leaves in 0u32..256 {
            let cyls: Vec<BitString> = (0..8)
                .filter(|i| leaves >> i & 1 == 1)
                .map(|i| BitString::from_value(i as u128, 3).unwrap())
                .collect();
            let s = ClopenSet::from_cylinders(cyls);
            if !s.measure().le_pow2_neg(2) {
                continue;
            }
            let m = fam.index_of(&s).unwrap();
            if let Some(prev) = seen.insert(m.clone(), s.clone()) {
                assert_eq!(prev, s, "index collision at {m}");
            }
            assert_eq!(fam.member(&m).unwrap(), s);
        }
        assert!(seen.len() > 30);
    }

    #[test]
    fn pattern_indices_stay_small_and_lazy() {
        let fam = ClopenFamily::new(4);
        let bits: BitString = "00000".parse().unwrap();
        let m = fam.index_of_pattern(30, bits.clone()).unwrap();
        // The description is a few dozen bits even though the set has 2^30
        // canonical cylinders.
        assert!(m.bits() < 128);
        let mut x_bits = vec![1u8; 30];
        x_bits.extend_from_slice(&[0, 0, 0, 0, 0]);
        let x = BitString::from_bits(x_bits).unwrap();
        assert_eq!(fam.member_contains(&m, &x), Some(true));
        let mut y_bits = vec![1u8; 30];
        y_bits.extend_from_slice(&[0, 0, 1, 0, 0]);
        let y = BitString::from_bits(y_bits).unwrap();
        assert_eq!(fam.member_contains(&m, &y), Some(false));
        let z = BitString::from_bits(vec![1u8; 20]).unwrap();
        assert_eq!(fam.member_contains(&m, &z), None);
        // Materialization respects the budget error path.
        let e = fam.expr(&m).unwrap();
        assert!(e.materialize(1024).is_err());
    }

    #[test]
    fn union_indices_validate_measure() {
        let fam = ClopenFamily::new(2);
        let a = fam.index_of(&set(&["000"])).unwrap();
        let b = fam.index_of(&set(&["001"])).unwrap();
        let u = fam.index_union(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(fam.member(&u).unwrap(), set(&["00"]));
        // Measure overflow is rejected.
        let fam0 = ClopenFamily::new(1);
        let c = fam0.index_of(&set(&["0"])).unwrap();
        let d = fam0.index_of(&set(&["1"])).unwrap();
        assert!(fam0.index_union(&[c, d]).is_err());
        // All-empty unions collapse to index zero.
        assert_eq!(
            fam.index_union(&[BigUint::zero(), BigUint::zero()]).unwrap(),
            BigUint::zero()
        );
    }
}
