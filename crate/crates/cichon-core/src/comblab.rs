//! Finite analogues of the combinatorial characterizations, with an
//! exhaustive oracle.
//!
//! Word families over `k^N` are searched for two covering-style
//! properties: infinitely-often-equal ("every word agrees with some family
//! member somewhere") and its evasion dual ("no word meets every family
//! member"). Exhaustive search refutes all smaller families, so reported
//! minima carry a proof-of-minimality flag; the greedy method gives
//! certified upper bounds. Exhaustive scans parallelize over the candidate
//! families with a deterministic lexicographic-least winner.

use crate::bits::BitString;
use crate::clopen::ClopenSet;
use crate::codecs::good::GoodFamily;
use crate::codecs::meager::MeagerCode;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::par;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type Word = Vec<u8>;

/// The space `k^N` of words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnSpace {
    pub length: u32,
    pub alphabet: u32,
}

impl FnSpace {
    pub fn new(length: u32, alphabet: u32) -> Result<Self> {
        if length == 0 || alphabet == 0 || alphabet > 255 {
            return Err(Error::Precondition(
                "need length >= 1 and 1 <= alphabet <= 255".into(),
            ));
        }
        Ok(FnSpace { length, alphabet })
    }

    pub fn size(&self) -> Option<u64> {
        (self.alphabet as u64).checked_pow(self.length)
    }

    pub fn words(&self, cap: u64) -> Result<Vec<Word>> {
        let size = self.size().filter(|&s| s <= cap).ok_or_else(|| {
            Error::SearchBound(format!(
                "k^N = {}^{} exceeds the exhaustive cap {cap}",
                self.alphabet, self.length
            ))
        })?;
        let mut out = Vec::with_capacity(size as usize);
        let mut w = vec![0u8; self.length as usize];
        loop {
            out.push(w.clone());
            let mut i = self.length as usize;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                w[i] += 1;
                if (w[i] as u32) < self.alphabet {
                    break;
                }
                w[i] = 0;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub space: FnSpace,
    pub value: u64,
    pub witness: Vec<Word>,
    pub method: Method,
    /// Exhaustive runs refute every smaller family.
    pub minimal: bool,
}

/// Does `f` cover `g` in the infinitely-often-equal sense: agreement at
/// some coordinate?
fn agrees_somewhere(f: &Word, g: &Word) -> bool {
    f.iter().zip(g).any(|(a, b)| a == b)
}

/// Does `f` kill `g` in the evasion sense: disagreement at every
/// coordinate?
fn disagrees_everywhere(f: &Word, g: &Word) -> bool {
    f.iter().zip(g).all(|(a, b)| a != b)
}

/// Budgets for the family searches.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Cap on `k^N` for materializing the space.
    pub space_cap: u64,
    /// Cap on candidate families examined per size.
    pub combos_per_size: u64,
    /// Cap on the family size tried.
    pub max_size: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            space_cap: 1 << 16,
            combos_per_size: 2_000_000,
            max_size: 6,
        }
    }
}

/// All `size`-subsets of `0..n` in lexicographic order, capped.
fn combinations(n: usize, size: usize, cap: u64) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    if size > n {
        return Ok(out);
    }
    loop {
        out.push(idx.clone());
        if out.len() as u64 > cap {
            return Err(Error::SearchBound(format!(
                "more than {cap} candidate families of size {size}"
            )));
        }
        // Advance the lexicographic combination.
        let mut i = size;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] + 1 <= n - (size - i) {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn minimal_family(
    space: FnSpace,
    covers: fn(&Word, &Word) -> bool,
    budget: &SearchBudget,
) -> Result<FamilyReport> {
    let words = space.words(budget.space_cap)?;
    for size in 1..=budget.max_size.min(words.len() as u64) {
        let combos = combinations(words.len(), size as usize, budget.combos_per_size)?;
        let hit = par::find_first(combos.len(), |c| {
            let family: Vec<&Word> = combos[c].iter().map(|&i| &words[i]).collect();
            words.iter().all(|g| family.iter().any(|f| covers(f, g)))
        });
        if let Some(c) = hit {
            return Ok(FamilyReport {
                space,
                value: size,
                witness: combos[c].iter().map(|&i| words[i].clone()).collect(),
                method: Method::Exhaustive,
                minimal: true,
            });
        }
    }
    Err(Error::SearchBound(format!(
        "no family of size <= {} has the property",
        budget.max_size
    )))
}

fn greedy_family(
    space: FnSpace,
    covers: fn(&Word, &Word) -> bool,
    budget: &SearchBudget,
) -> Result<FamilyReport> {
    let words = space.words(budget.space_cap)?;
    let mut uncovered: BTreeSet<usize> = (0..words.len()).collect();
    let mut witness = Vec::new();
    while !uncovered.is_empty() {
        // Lexicographically least word of maximum new coverage.
        let mut best: Option<(usize, usize)> = None;
        for (i, f) in words.iter().enumerate() {
            let gain = uncovered.iter().filter(|&&g| covers(f, &words[g])).count();
            if best.map(|(bg, _)| gain > bg).unwrap_or(gain > 0) {
                best = Some((gain, i));
            }
        }
        let Some((_, i)) = best else {
            return Err(Error::SearchBound(
                "greedy cannot extend coverage; no finite family works".into(),
            ));
        };
        uncovered.retain(|&g| !covers(&words[i], &words[g]));
        witness.push(words[i].clone());
        if witness.len() as u64 > budget.max_size.max(64) {
            return Err(Error::SearchBound("greedy family grew past the cap".into()));
        }
    }
    // Certify the bound.
    debug_assert!(words
        .iter()
        .all(|g| witness.iter().any(|f| covers(f, g))));
    Ok(FamilyReport {
        value: witness.len() as u64,
        space,
        witness,
        method: Method::Greedy,
        minimal: false,
    })
}

/// Minimal family meeting every word somewhere (infinitely-often-equal
/// analogue).
pub fn ioe_number(space: FnSpace, method: Method, budget: &SearchBudget) -> Result<FamilyReport> {
    match method {
        Method::Exhaustive => minimal_family(space, agrees_somewhere, budget),
        Method::Greedy => greedy_family(space, agrees_somewhere, budget),
    }
}

/// Minimal family no word can meet everywhere (evasion analogue).
pub fn ed_number(space: FnSpace, method: Method, budget: &SearchBudget) -> Result<FamilyReport> {
    match method {
        Method::Exhaustive => minimal_family(space, disagrees_everywhere, budget),
        Method::Greedy => greedy_family(space, disagrees_everywhere, budget),
    }
}

/// Slalom localization of a finite family on `[n0, n_end)`: the forced
/// minimal-weight slalom is the pointwise value set. Reports the exact
/// weight and whether it fits the budget.
#[derive(Debug, Clone, Serialize)]
pub struct LocalizeReport {
    pub traps: Vec<Vec<u64>>,
    pub weight: Dyadic,
    pub within_budget: bool,
    /// Anti-localization audit: for each input word, the positions where
    /// it escapes the traps.
    pub escapes: Vec<Vec<u32>>,
}

pub fn slalom_localize(
    family: &[Vec<u64>],
    n0: u32,
    n_end: u32,
    weight_budget: &Dyadic,
) -> LocalizeReport {
    let mut traps = Vec::new();
    let mut weight = Dyadic::zero();
    for n in n0..n_end {
        let mut trap = BTreeSet::new();
        for f in family {
            if let Some(&v) = f.get(n as usize) {
                trap.insert(v);
            }
        }
        weight = weight.add(&Dyadic::from_u64(trap.len() as u64).shr(n));
        traps.push(trap.into_iter().collect::<Vec<u64>>());
    }
    let escapes = family
        .iter()
        .map(|f| {
            (n0..n_end)
                .filter(|&n| {
                    f.get(n as usize)
                        .map(|v| !traps[(n - n0) as usize].contains(v))
                        .unwrap_or(false)
                })
                .collect()
        })
        .collect();
    LocalizeReport {
        within_budget: weight <= *weight_budget,
        traps,
        weight,
        escapes,
    }
}

/// A partial function given by parallel (domain, values) lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFn {
    pub domain: Vec<u64>,
    pub values: Vec<u64>,
}

impl PartialFn {
    pub fn get(&self, z: u64) -> Option<u64> {
        self.domain
            .iter()
            .position(|&d| d == z)
            .map(|i| self.values[i])
    }
}

/// The diagonal selector: choose distinct `z_n ∈ dom(h(n))` (least unused)
/// and set `g(z_n) = h(n)(z_n)`. Domain sizes `|dom(h(n))| = n + 1`
/// guarantee the choice by counting.
pub fn build_diagonal_g(h: &[PartialFn]) -> Result<(BTreeMap<u64, u64>, Vec<u64>)> {
    for (n, hn) in h.iter().enumerate() {
        if hn.domain.len() != n + 1 || hn.values.len() != n + 1 {
            return Err(Error::Precondition(format!(
                "|dom(h({n}))| = {} != {}",
                hn.domain.len(),
                n + 1
            )));
        }
        let distinct: BTreeSet<u64> = hn.domain.iter().copied().collect();
        if distinct.len() != n + 1 {
            return Err(Error::Precondition(format!(
                "dom(h({n})) has repeated points"
            )));
        }
    }
    let mut used = BTreeSet::new();
    let mut g = BTreeMap::new();
    let mut trace = Vec::new();
    for hn in h {
        let mut dom: Vec<u64> = hn.domain.clone();
        dom.sort_unstable();
        let z = *dom
            .iter()
            .find(|z| !used.contains(*z))
            .expect("counting: n+1 points, n used");
        used.insert(z);
        g.insert(z, hn.get(z).expect("z in domain"));
        trace.push(z);
    }
    Ok((g, trace))
}

/// Greedy interleaving: `n_{k+1} = max(Σ_{i<=k} n_i, max_f f(n_k)) + 1`,
/// while inside `[0, range)`. Every produced step satisfies both stated
/// inequalities.
pub fn build_interleaving(family: &[Vec<u64>], range: u64) -> Result<Vec<u64>> {
    for (i, f) in family.iter().enumerate() {
        if f.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Precondition(format!("word {i} is not monotone")));
        }
    }
    let mut seq = vec![0u64];
    let mut sum = 0u64;
    loop {
        let last = *seq.last().unwrap();
        sum += last;
        let reach = family
            .iter()
            .filter_map(|f| f.get(last as usize).copied())
            .max()
            .unwrap_or(0);
        let next = sum.max(reach) + 1;
        if next >= range {
            return Ok(seq);
        }
        seq.push(next);
    }
}

/// Stage report of the dense-tails construction.
#[derive(Debug, Clone, Serialize)]
pub struct GdeltaReport {
    /// `g_x(n)` per code, on the window; `None` where the search ran out.
    pub g: Vec<Vec<Option<u64>>>,
    /// Levels at which the given bound fails to dominate some `g_x`.
    pub domination_failures: Vec<(usize, u32)>,
    /// Density of each emitted stage at the requested depth.
    pub stage_dense: Vec<bool>,
    /// Inclusion of each stage in every code's dense tail.
    pub stages_inside_tails: bool,
}

/// The dense-tails construction: for a spine `z`, codes `f_x` over the
/// interval family and a candidate bound `h`, compute
/// `g_x(n) = min{l : every [t ++ z on [n, l)] with |t| = n is inside the
/// dense tail of f_x past n}`, check `h` dominates, and audit the stages
/// `∪_{m > n} {x : x = z on [m, h(m))}`.
pub fn build_dense_gdelta(
    z: &BitString,
    h: &[u64],
    codes: &[MeagerCode],
    n0: u32,
    n_end: u32,
    density_depth: u32,
    search_cap: u64,
) -> Result<GdeltaReport> {
    let fam = GoodFamily::Intervals;
    let horizon = codes
        .iter()
        .map(|c| c.horizon())
        .min()
        .unwrap_or(0)
        .min(n_end + 1);
    if horizon <= n0 + 1 {
        return Err(Error::Precondition("window beyond code horizons".into()));
    }
    // Materialize each code's tail unions once per level.
    let mut tails: Vec<Vec<ClopenSet>> = Vec::new();
    for code in codes {
        let mut per_level = Vec::new();
        for n in n0..horizon - 1 {
            let mut parts = Vec::new();
            for m in (n + 1)..horizon {
                parts.push(fam.member_set(m, code.level(m).unwrap(), 1 << 20)?);
            }
            per_level.push(ClopenSet::union_all(parts.iter()));
        }
        tails.push(per_level);
    }
    let mut g: Vec<Vec<Option<u64>>> = Vec::new();
    for per_level in &tails {
        let mut gx = Vec::new();
        for (off, tail) in per_level.iter().enumerate() {
            let n = n0 + off as u32;
            let mut found = None;
            'search: for l in (n as u64 + 1)..(n as u64 + 1 + search_cap) {
                if l as usize > z.len() {
                    break;
                }
                let zpart = z.slice(n as usize, l as usize).unwrap();
                for t in BitString::all_of_length(n as usize) {
                    let cyl = t.concat(&zpart)?;
                    if !tail.contains_cylinder(&cyl) {
                        continue 'search;
                    }
                }
                found = Some(l);
                break;
            }
            gx.push(found);
        }
        g.push(gx);
    }
    let mut domination_failures = Vec::new();
    for (x, gx) in g.iter().enumerate() {
        for (off, val) in gx.iter().enumerate() {
            let n = n0 + off as u32;
            match val {
                Some(l) => {
                    if h.get(n as usize).copied().unwrap_or(0) < *l {
                        domination_failures.push((x, n));
                    }
                }
                None => domination_failures.push((x, n)),
            }
        }
    }
    // Stages of the dense set: levels m in (n0, horizon), pattern z on
    // [m, h(m)).
    let mut stage_sets = Vec::new();
    for m in (n0 + 1)..horizon {
        let hi = h.get(m as usize).copied().unwrap_or(0).min(z.len() as u64);
        if hi <= m as u64 {
            continue;
        }
        let zpart = z.slice(m as usize, hi as usize).unwrap();
        stage_sets.push((m, zpart));
    }
    let mut stage_dense = Vec::new();
    let mut stages_inside_tails = domination_failures.is_empty();
    for (m, zpart) in &stage_sets {
        let expr = crate::index::ClopenExpr::Pattern {
            start: *m as u64,
            bits: zpart.clone(),
        };
        let set = expr.materialize(1 << 20)?;
        stage_dense.push(set.is_dense_at_depth(density_depth.min(*m)));
        // Levelwise inclusion into every code's tail past n0.
        for per_level in &tails {
            if !per_level[0].includes(&set) {
                stages_inside_tails = false;
            }
        }
    }
    Ok(GdeltaReport {
        g,
        domination_failures,
        stage_dense,
        stages_inside_tails,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codecs::GoodFamilyKind;

    fn space(n: u32, k: u32) -> FnSpace {
        FnSpace::new(n, k).unwrap()
    }

    #[test]
    fn ioe_trivial_alphabet() {
        // One symbol: the single constant word agrees everywhere.
        let r = ioe_number(space(5, 1), Method::Exhaustive, &SearchBudget::default()).unwrap();
        assert_eq!(r.value, 1);
        assert!(r.minimal);
    }

    #[test]
    fn ioe_two_by_two() {
        let r = ioe_number(space(2, 2), Method::Exhaustive, &SearchBudget::default()).unwrap();
        assert_eq!(r.value, 2);
        assert!(r.minimal);
        let g = ioe_number(space(2, 2), Method::Greedy, &SearchBudget::default()).unwrap();
        assert!(g.value >= r.value);
    }

    #[test]
    fn ioe_three_bits_oracle() {
        // Exhaustive over 2^3 words; complement duality shows one word
        // misses only its complement, so two words still suffice.
        let r = ioe_number(space(3, 2), Method::Exhaustive, &SearchBudget::default()).unwrap();
        assert_eq!(r.value, 2);
        let g = ioe_number(space(3, 2), Method::Greedy, &SearchBudget::default()).unwrap();
        assert!(g.value >= r.value);
    }

    #[test]
    fn ioe_greedy_at_least_exhaustive_sweep() {
        for (n, k) in [(1u32, 2u32), (2, 2), (3, 2), (2, 3), (1, 4), (2, 4), (3, 3)] {
            let budget = SearchBudget::default();
            let e = ioe_number(space(n, k), Method::Exhaustive, &budget).unwrap();
            let g = ioe_number(space(n, k), Method::Greedy, &budget).unwrap();
            assert!(g.value >= e.value, "greedy beat exhaustive at ({n},{k})");
        }
    }

    #[test]
    fn duality_sanity_two_symbols() {
        // Over {0,1}: g avoids f everywhere iff g is the pointwise
        // complement of f.
        let words = space(4, 2).words(1 << 10).unwrap();
        for f in &words {
            for g in &words {
                let avoid = disagrees_everywhere(f, g);
                let complement = f.iter().zip(g).all(|(a, b)| *b == 1 - *a);
                assert_eq!(avoid, complement);
            }
        }
    }

    #[test]
    fn ed_examples() {
        // Singletons always fail (take g = f).
        let budget = SearchBudget::default();
        let r = ed_number(space(2, 2), Method::Exhaustive, &budget).unwrap();
        assert!(r.value > 1);
        assert_eq!(r.value, 4);
        // Over two symbols evasion forces every complement into the
        // family, so ed(N, 2) = 2^N; monotone in N on the computed range.
        let r1 = ed_number(space(1, 2), Method::Exhaustive, &budget).unwrap();
        assert_eq!(r1.value, 2);
        assert!(r.value >= r1.value);
        let wide = SearchBudget {
            max_size: 8,
            ..SearchBudget::default()
        };
        let r3 = ed_number(space(3, 2), Method::Exhaustive, &wide).unwrap();
        assert_eq!(r3.value, 8);
        assert!(r3.value >= r.value);
        // Alphabet of one: no family evades the constant word.
        assert!(ed_number(space(3, 1), Method::Exhaustive, &budget).is_err());
    }

    #[test]
    fn localize_forced_sets() {
        // Singleton family: traps are singletons, weight below 2.
        let f = vec![vec![3u64; 8]];
        let r = slalom_localize(&f, 0, 8, &Dyadic::from_u64(2));
        assert!(r.within_budget);
        assert!(r.traps.iter().all(|t| t.len() == 1));
        // Full binary family: the whole alphabet is forced.
        let full: Vec<Vec<u64>> = space(8, 2)
            .words(1 << 10)
            .unwrap()
            .into_iter()
            .map(|w| w.into_iter().map(|b| b as u64).collect())
            .collect();
        let r = slalom_localize(&full, 0, 8, &Dyadic::from_u64(4));
        let expect = (0..8).fold(Dyadic::zero(), |a, n| {
            a.add(&Dyadic::from_u64(2).shr(n))
        });
        assert_eq!(r.weight, expect);
        assert!(r.escapes.iter().all(|e| e.is_empty()));
    }

    #[test]
    fn diagonal_selector() {
        // h(n) = identity on [0, n]: least-unused picks z_n = n.
        let h: Vec<PartialFn> = (0..6)
            .map(|n| PartialFn {
                domain: (0..=n as u64).collect(),
                values: (0..=n as u64).collect(),
            })
            .collect();
        let (g, trace) = build_diagonal_g(&h).unwrap();
        assert_eq!(trace, vec![0, 1, 2, 3, 4, 5]);
        for (z, v) in &g {
            assert_eq!(z, v);
        }
        // Adversarial overlapping domains still succeed by counting.
        let h: Vec<PartialFn> = (0..8)
            .map(|n| PartialFn {
                domain: (0..=n as u64).rev().collect(),
                values: vec![7; n + 1],
            })
            .collect();
        let (_g, trace) = build_diagonal_g(&h).unwrap();
        let distinct: BTreeSet<u64> = trace.iter().copied().collect();
        assert_eq!(distinct.len(), trace.len());
        // Domain size precondition.
        let bad = vec![PartialFn {
            domain: vec![0, 1],
            values: vec![0, 0],
        }];
        assert!(build_diagonal_g(&bad).is_err());
    }

    #[test]
    fn interleaving_examples() {
        let identity: Vec<u64> = (0..1000).collect();
        let seq = build_interleaving(&[identity.clone()], 1000).unwrap();
        for w in seq.windows(2) {
            assert!(identity[w[0] as usize] < w[1]);
        }
        let double: Vec<u64> = (0..1000).map(|n| 2 * n).collect();
        let seq = build_interleaving(&[double.clone()], 1000).unwrap();
        for w in seq.windows(2) {
            assert!(w[1] > 2 * w[0]);
        }
        // Ten random-ish monotone words over a long range: all dominance
        // checks pass, and partial sums stay below the next step.
        let fams: Vec<Vec<u64>> = (0..10u64)
            .map(|j| (0..10_000u64).map(|n| n * (j % 3 + 1) + j * j).collect())
            .collect();
        let seq = build_interleaving(&fams, 10_000).unwrap();
        let mut sum = 0u64;
        for w in seq.windows(2) {
            sum += w[0];
            assert!(w[1] > sum);
            for f in &fams {
                assert!(f[w[0] as usize] < w[1]);
            }
        }
        assert!(build_interleaving(&[vec![3, 2, 1]], 10).is_err());
    }

    #[test]
    fn dense_gdelta_stages() {
        // A single interval code with width-1 patterns and a spine z = 1s:
        // the construction finds g_x and a generous h dominates.
        let code = MeagerCode::new(GoodFamilyKind::Intervals, vec![1; 10]);
        let z = BitString::from_bits(vec![1; 20]).unwrap();
        let h: Vec<u64> = (0..12u64).map(|n| n + 3).collect();
        let rep = build_dense_gdelta(&z, &h, &[code.clone()], 1, 8, 4, 16).unwrap();
        assert!(
            rep.domination_failures.is_empty(),
            "failures: {:?} g: {:?}",
            rep.domination_failures,
            rep.g
        );
        assert!(rep.stages_inside_tails);
        assert!(rep.stage_dense.iter().all(|&d| d));
        // An h that is too small reports the violating (x, n).
        let small: Vec<u64> = (0..12u64).map(|n| n + 1).collect();
        let rep = build_dense_gdelta(&z, &small, &[code], 1, 8, 4, 16).unwrap();
        assert!(!rep.domination_failures.is_empty());
    }
}
