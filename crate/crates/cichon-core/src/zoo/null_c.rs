//! The two morphisms between the coded null ideal and the slalom system.
//!
//! Forward (`null_to_C`): `φ_-(f)` pairs adjacent code levels into traps,
//! `φ_-(f)(n) = {f(2n), f(2n+1)}`; `φ_+(S)` assembles
//! `C^n_{g(n)} = ∪_{k∈S(n)} (C^{2n}_k ∪ C^{2n+1}_k)`. Whenever the traps
//! cover the pairs, the level sets include levelwise, hence so do the
//! stages.
//!
//! Backward (`C_to_null`): `φ_-(S)` encodes the tail unions of the
//! block-zero sets selected by the traps; `φ_+(f)` collects, for each
//! basic set `U_j` meeting the complement `K` of a stage of `f`, the
//! block indices whose zero set misses `K ∩ U_j`, merged along the
//! diagonal `S^f_∞(n) = ∪_{j<=n} S^f_j(n)`.

use crate::codecs::null::NullCode;
use crate::dyadic::Dyadic;
use crate::error::Truncation;
use crate::index::ClopenFamily;
use crate::slalom::Slalom;
use crate::tukey::morphism::Morphism;
use crate::tukey::{forall_window, sys_cof_null, sys_slalom, Carrier, Verdict, Window};
use crate::zoo::blocks;
use num_bigint::BigUint;
use std::collections::BTreeSet;
use std::sync::Arc;

/// `φ_-` of the forward morphism: adjacent levels into traps.
pub fn pair_levels(f: &NullCode) -> Slalom {
    let levels = (f.horizon() / 2) as usize;
    let mut traps = Vec::with_capacity(levels);
    for n in 0..levels {
        let mut t = BTreeSet::new();
        t.insert(f.f[2 * n].clone());
        t.insert(f.f[2 * n + 1].clone());
        traps.push(t);
    }
    // Each trap has at most two entries: weight <= Σ 2/2^n = 4.
    Slalom::new(traps, Dyadic::from_u64(4)).expect("weight bound")
}

/// `φ_+` of the forward morphism: per-level unions re-indexed one level
/// up. Truncates at the first level whose union cannot be certified under
/// the level's measure bound.
pub fn assemble_union_code(s: &Slalom) -> Result<NullCode, Truncation> {
    let mut f = Vec::new();
    for n in 0..s.horizon() {
        let trap = s.trap(n).expect("in range");
        let parts: Vec<BigUint> = trap.iter().cloned().collect();
        // The same trap is tried at both source levels; an index valid at
        // level 2n (or 2n+1) is valid at level n as well, and invalid
        // entries denote the empty set consistently on both sides.
        match ClopenFamily::new(n).index_union(&parts) {
            Ok(m) => f.push(m),
            Err(_) => {
                let mut code = NullCode::new(f);
                code.truncated = Some(Truncation::new(n as u64, "union-measure"));
                return Ok(code);
            }
        }
    }
    Ok(NullCode::new(f))
}

/// `N ⪯ C`: the forward morphism.
pub fn m_null_to_c() -> Morphism {
    Morphism {
        name: "null_to_C".into(),
        source: sys_cof_null(),
        target: sys_slalom(),
        phi_minus: Arc::new(|a, _w| {
            let f = a.as_null().expect("null carrier");
            Ok(Carrier::Slalom(pair_levels(f)))
        }),
        phi_plus: Arc::new(|b, _w| {
            let s = b.as_slalom().expect("slalom carrier");
            Ok(Carrier::Null(assemble_union_code(s)?))
        }),
        // Levelwise alignment: level n of g must absorb levels 2n, 2n+1 of
        // f. (Levelwise inclusion implies stagewise inclusion with the
        // doubled window, which the unit tests check separately.)
        a_check: Some(Arc::new(|a, _b, gb, w| {
            let (f, g) = (a.as_null().unwrap(), gb.as_null().unwrap());
            forall_window(w.n0, w.n_end, |n| {
                if 2 * n + 1 >= f.horizon() || n >= g.horizon() {
                    return None;
                }
                if g.truncated.as_ref().map(|t| t.at <= n as u64) == Some(true) {
                    return None;
                }
                let lo = f.level_set(2 * n).ok()?;
                let hi = f.level_set(2 * n + 1).ok()?;
                let target = g.level_set(n).ok()?;
                Some(target.includes(&lo.union(&hi)))
            })
        })),
    }
}

/// `φ_-` of the backward morphism: the trap-selected block-zero tail
/// unions, one level per certified tail bound.
pub fn encode_block_tails(s: &Slalom, depth: u32) -> Result<NullCode, Truncation> {
    let horizon = s.horizon();
    // Exact tail weights of the block union: tail(j) = Σ_{n>j} |S(n)| 2^-n.
    let mut tail = vec![Dyadic::zero(); horizon as usize + 1];
    for j in (0..horizon as usize).rev() {
        let here = if j + 1 < horizon as usize {
            let t = s.trap(j as u32 + 1).unwrap();
            Dyadic::from_u64(t.len() as u64).shr(j as u32 + 1)
        } else {
            Dyadic::zero()
        };
        tail[j] = tail[j + 1].add(&here);
    }
    let mut f = Vec::new();
    for level in 0..horizon {
        // The coarsest tail whose measure bound fits this level.
        let Some(j) = (0..horizon).find(|&j| tail[j as usize].le_pow2_neg(level)) else {
            let mut code = NullCode::new(f);
            code.truncated = Some(Truncation::new(level as u64, "tail-weight"));
            return Ok(code);
        };
        let fam = ClopenFamily::new(level);
        let mut parts = Vec::new();
        for n in (j + 1)..horizon {
            for k in s.trap(n).unwrap() {
                let Ok(i) = u32::try_from(u64::try_from(k).unwrap_or(u64::MAX)) else {
                    let mut code = NullCode::new(f);
                    code.truncated = Some(Truncation::new(level as u64, "block-index"));
                    return Ok(code);
                };
                if blocks::block(n.max(1), i).end > depth as u64 {
                    let mut code = NullCode::new(f);
                    code.truncated = Some(Truncation::new(level as u64, "block-depth"));
                    return Ok(code);
                }
                parts.push(fam.index_of_pattern(
                    blocks::block(n.max(1), i).start,
                    crate::bits::BitString::from_bits(vec![0; n.max(1) as usize]).unwrap(),
                ).map_err(|_| Truncation::new(level as u64, "pattern-level"))?);
            }
        }
        match fam.index_union(&parts) {
            Ok(m) => f.push(m),
            Err(_) => {
                let mut code = NullCode::new(f);
                code.truncated = Some(Truncation::new(level as u64, "union-measure"));
                return Ok(code);
            }
        }
    }
    Ok(NullCode::new(f))
}

/// Is there a point of the window-depth space that extends `u`, is zero
/// on `block`, and avoids every pattern in `avoid`? Exact, by a small
/// constraint search over the touched coordinates (node budget; `None`
/// when the budget runs out).
fn region_escapes(
    u: &crate::bits::BitString,
    block: std::ops::Range<u64>,
    avoid: &[(u64, crate::bits::BitString)],
    depth: u32,
    budget: &mut u64,
) -> Option<bool> {
    // Forced coordinates: the prefix u and the zero block.
    let fix = |i: u64| -> Option<u8> {
        if i < u.len() as u64 {
            u.bit(i as usize)
        } else if block.contains(&i) {
            Some(0)
        } else {
            None
        }
    };
    // Coordinates the avoided patterns look at, in order.
    let mut coords: Vec<u64> = avoid
        .iter()
        .flat_map(|(s, bits)| *s..s + bits.len() as u64)
        .filter(|&i| i < depth as u64 && fix(i).is_none())
        .collect();
    coords.sort_unstable();
    coords.dedup();
    // A pattern is already broken if some decided coordinate mismatches;
    // satisfied-so-far patterns constrain the search.
    fn rec(
        coords: &[u64],
        assign: &mut std::collections::BTreeMap<u64, u8>,
        fix: &dyn Fn(u64) -> Option<u8>,
        avoid: &[(u64, crate::bits::BitString)],
        depth: u32,
        budget: &mut u64,
    ) -> Option<bool> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let value = |i: u64, assign: &std::collections::BTreeMap<u64, u8>| -> Option<u8> {
            fix(i).or_else(|| assign.get(&i).copied())
        };
        let mut all_broken = true;
        for (s, bits) in avoid {
            let mut broken = false;
            let mut complete = true;
            for (off, i) in (*s..s + bits.len() as u64).enumerate() {
                if i >= depth as u64 {
                    // Beyond the resolution the point is free: any pattern
                    // reaching past the depth can be broken out there.
                    broken = true;
                    break;
                }
                match value(i, assign) {
                    Some(b) => {
                        if Some(b) != bits.bit(off) {
                            broken = true;
                            break;
                        }
                    }
                    None => complete = false,
                }
            }
            if !broken {
                if complete {
                    return Some(false); // fully matched: this branch dies
                }
                all_broken = false;
            }
        }
        if all_broken {
            return Some(true);
        }
        let Some(&i) = coords.iter().find(|i| assign.get(i).is_none()) else {
            return Some(false);
        };
        for b in [1u8, 0u8] {
            assign.insert(i, b);
            match rec(coords, assign, fix, avoid, depth, budget) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => {
                    assign.remove(&i);
                    return None;
                }
            }
            assign.remove(&i);
        }
        Some(false)
    }
    let mut assign = std::collections::BTreeMap::new();
    rec(&coords, &mut assign, &fix, avoid, depth, budget)
}

/// `φ_+` of the backward morphism: the diagonal merge of the miss-sets
/// `S^f_j(n) = {i : K ∩ U_j != ∅ and K ∩ U_j ∩ G^n_i = ∅}`, where `K` is
/// the complement of an early stage of `f` at the window depth. All tests
/// run on the codes' pattern descriptions; nothing materializes.
pub fn collect_miss_sets(f: &NullCode, w: &Window) -> Result<Slalom, Truncation> {
    let horizon = f.horizon();
    if horizon < 2 {
        return Err(Truncation::new(0, "code-horizon"));
    }
    let top = (horizon - 1).min(w.n_end);
    // The stage's levels, flattened to avoided patterns.
    let mut avoid: Vec<(u64, crate::bits::BitString)> = Vec::new();
    for n in 1..=top {
        if let Some(e) = ClopenFamily::new(n).expr(f.level_index(n).expect("in range")) {
            if e.max_depth() > w.depth as u64 {
                return Err(Truncation::new(n as u64, "stage-depth"));
            }
            e.flatten_patterns(&mut avoid);
        }
    }
    let pairs = blocks::pairs_within_depth(w.depth);
    let levels = w.n_end.min(horizon);
    let mut traps: Vec<BTreeSet<BigUint>> = Vec::new();
    for n in 0..levels {
        let mut merged = BTreeSet::new();
        if n >= 1 {
            for j in 0..=(n as u64) {
                let u = crate::bits::basis_cylinder(j);
                // K ∩ U_j nonempty: a point in u avoiding all patterns.
                let mut budget = 100_000u64;
                match region_escapes(&u, 0..0, &avoid, w.depth, &mut budget) {
                    Some(true) => {}
                    Some(false) => continue,
                    None => return Err(Truncation::new(n as u64, "search-budget")),
                }
                for &(bn, bi) in &pairs {
                    if bn != n {
                        continue;
                    }
                    let mut budget = 100_000u64;
                    match region_escapes(&u, blocks::block(bn, bi), &avoid, w.depth, &mut budget)
                    {
                        Some(false) => {
                            merged.insert(BigUint::from(bi));
                        }
                        Some(true) => {}
                        None => return Err(Truncation::new(n as u64, "search-budget")),
                    }
                }
            }
        }
        traps.push(merged);
    }
    let cert = {
        let mut acc = Dyadic::zero();
        for (n, t) in traps.iter().enumerate() {
            acc = acc.add(&Dyadic::from_u64(t.len() as u64).shr(n as u32));
        }
        acc
    };
    Ok(Slalom::new(traps, cert).expect("exact cert"))
}

/// `C ⪯ N`: the backward morphism.
pub fn m_c_to_null() -> Morphism {
    Morphism {
        name: "C_to_null".into(),
        source: sys_slalom(),
        target: sys_cof_null(),
        phi_minus: Arc::new(|a, w| {
            let s = a.as_slalom().expect("slalom carrier");
            Ok(Carrier::Null(encode_block_tails(s, w.depth)?))
        }),
        phi_plus: Arc::new(|b, w| {
            let f = b.as_null().expect("null carrier");
            Ok(Carrier::Slalom(collect_miss_sets(f, w)?))
        }),
        // Levelwise trap inclusion, restricted to block indices decidable
        // at the window depth. The construction promises inclusion only
        // once the selected block set is inside the hypothesis code's
        // stage (the eventual-inclusion lag), so misses outside the stage
        // are undecided rather than violations.
        a_check: Some(Arc::new(|a, b, gb, w| {
            let (s, t) = (a.as_slalom().unwrap(), gb.as_slalom().unwrap());
            let f = b.as_null().unwrap();
            if f.horizon() < 2 {
                return Verdict::Unknown;
            }
            let top = f.horizon() - 1;
            let mut stage_patterns: Vec<(u64, crate::bits::BitString)> = Vec::new();
            for n in 1..=top {
                if let Some(idx) = f.level_index(n) {
                    if let Some(e) = ClopenFamily::new(n).expr(idx) {
                        e.flatten_patterns(&mut stage_patterns);
                    }
                }
            }
            forall_window(w.n0, w.n_end, |n| {
                let (sn, tn) = (s.trap(n)?, t.trap(n)?);
                let mut all_known = true;
                for k in sn {
                    let decidable = u64::try_from(k)
                        .ok()
                        .and_then(|k| u32::try_from(k).ok())
                        .filter(|&i| n >= 1 && blocks::block(n.max(1), i).end <= w.depth as u64);
                    let Some(i) = decidable else {
                        all_known = false;
                        continue;
                    };
                    if tn.contains(k) {
                        continue;
                    }
                    // Not in the miss set: genuine violation only if the
                    // zero set is certainly inside the stage.
                    let mut budget = 100_000u64;
                    match region_escapes(
                        &crate::bits::BitString::empty(),
                        blocks::block(n, i),
                        &stage_patterns,
                        w.depth,
                        &mut budget,
                    ) {
                        Some(false) => return Some(false),
                        _ => all_known = false,
                    }
                }
                if all_known {
                    Some(true)
                } else {
                    None
                }
            })
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::ClopenSet;
    use crate::codecs::null::{null_encode, null_stage};

    fn set(cyls: &[&str]) -> ClopenSet {
        ClopenSet::from_cylinders(cyls.iter().map(|s| s.parse().unwrap()))
    }

    #[test]
    fn empty_code_maps_to_empty_everything() {
        let f = NullCode::empty(8);
        let s = pair_levels(&f);
        assert_eq!(s.horizon(), 4);
        for n in 0..4 {
            assert_eq!(s.trap(n).unwrap().len(), 1); // {0, 0} collapses
            assert!(s.trap(n).unwrap().contains(&BigUint::default()));
        }
        let g = assemble_union_code(&s).unwrap();
        assert!(g.truncated.is_none());
        for n in 0..g.horizon() {
            assert!(g.level_set(n).unwrap().is_empty());
        }
    }

    #[test]
    fn forward_levelwise_and_stagewise_inclusion() {
        let covers = vec![
            set(&["00", "10"]),
            set(&["010"]),
            set(&["0110"]),
            set(&["00010"]),
            set(&["000001"]),
            set(&["0000001"]),
        ];
        let f = null_encode(&covers).unwrap();
        let s = pair_levels(&f);
        let g = assemble_union_code(&s).unwrap();
        assert!(g.truncated.is_none());
        // Levelwise: C^{2n}_{f(2n)} ∪ C^{2n+1}_{f(2n+1)} ⊆ C^n_{g(n)}.
        for n in 0..g.horizon().min(f.horizon() / 2) {
            let lo = f.level_set(2 * n).unwrap();
            let hi = f.level_set(2 * n + 1).unwrap();
            let target = g.level_set(n).unwrap();
            assert!(target.includes(&lo.union(&hi)), "level {n} fails");
            // Measure bound: the union fits the level's discipline.
            assert!(target.measure().le_pow2_neg(n));
        }
        // Stagewise with the doubled window: stage_f(2m+1, 2N+1) ⊆
        // stage_g(m, N).
        let big_n = g.horizon() - 1;
        for m in 0..big_n {
            let sf = null_stage(&f, 2 * m + 1, (2 * big_n + 1).min(f.horizon() - 1)).unwrap();
            let sg = null_stage(&g, m, big_n).unwrap();
            assert!(sg.includes(&sf), "stage {m} fails");
        }
    }

    #[test]
    fn backward_phi_minus_covers_block_set() {
        let w = Window::new(1, 6, 24).unwrap();
        // Traps selecting a couple of decidable blocks.
        let s = Slalom::from_u64_traps(
            vec![vec![], vec![0], vec![0], vec![0]],
            Dyadic::from_u64(2),
        )
        .unwrap();
        let code = encode_block_tails(&s, w.depth).unwrap();
        assert!(code.truncated.is_none());
        // A point that is zero on block(2, 0) and block(3, 0) lies in the
        // selected sets, hence in every encoded level that tracks tails
        // past those levels.
        let mut bits = vec![1u8; 24];
        for c in blocks::block(2, 0) {
            bits[c as usize] = 0;
        }
        for c in blocks::block(3, 0) {
            bits[c as usize] = 0;
        }
        let x = crate::bits::BitString::from_bits(bits).unwrap();
        let mut seen = false;
        for level in 0..code.horizon() {
            if code.level_contains(level, &x) == Some(true) {
                seen = true;
            }
        }
        assert!(seen, "block point lost by the tail encoding");
    }

    #[test]
    fn backward_miss_sets_catch_avoided_blocks() {
        // A code whose stage is exactly G^2_0's complement... simplest:
        // cover the block-zero set of (2, 0) so that K avoids it.
        let b = blocks::block(2, 0);
        let pattern = blocks::zero_set_expr(2, 0).materialize(1 << 12).unwrap();
        assert_eq!(pattern.measure(), Dyadic::pow2_neg(2));
        // Build a null code with that pattern at level 1 (measure 1/4 <=
        // 1/2) and empty elsewhere.
        let fam1 = ClopenFamily::new(1);
        let idx = fam1.index_of(&pattern).unwrap();
        let mut f = NullCode::empty(6);
        f.f[1] = idx;
        let w = Window::new(1, 5, 12).unwrap();
        let s = collect_miss_sets(&f, &w).unwrap();
        // K = complement of the stage = complement of G^2_0; every basic
        // region inside it misses G^2_0, so index 0 shows up at level 2.
        let trap2 = s.trap(2).unwrap();
        assert!(
            trap2.contains(&BigUint::from(0u32)),
            "miss-set at level 2 lacks the avoided block: {trap2:?}"
        );
        let _ = b;
    }

    #[test]
    fn full_space_k_has_empty_miss_sets() {
        // f = empty code: K = full space; no G^n_i misses K ∩ U_j.
        let f = NullCode::empty(6);
        let w = Window::new(1, 5, 16).unwrap();
        let s = collect_miss_sets(&f, &w).unwrap();
        for n in 0..s.horizon() {
            assert!(s.trap(n).unwrap().is_empty(), "level {n} not empty");
        }
    }
}
