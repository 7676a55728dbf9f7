//! The slalom/ℓ¹ equivalence pair.
//!
//! `ell1_to_C`: dyadic values bucket into levels by the half-open
//! convention `value ∈ [2^{-n-1}, 2^{-n})`; the pullback takes the
//! levelwise maximum `2^{-n}` over traps containing the position.
//!
//! `C_to_ell1`: positions and trap entries interleave through the Cantor
//! pairing; a trap entry `k ∈ S(m)` becomes the value `2^{-m}` at
//! position `pair(m, k)`, and the pullback collects, per level `m`, the
//! entries whose paired position is dominated at height `2^{-m}`. Weight
//! certificates on both sides are exact partial sums.

use crate::dyadic::Dyadic;
use crate::ell1::Ell1Seq;
use crate::error::Truncation;
use crate::slalom::Slalom;
use crate::tukey::morphism::Morphism;
use crate::tukey::{forall_window, sys_ell1, sys_slalom, Carrier, Verdict};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Cantor pairing.
pub fn pair(m: u64, k: u64) -> u64 {
    let s = m + k;
    s * (s + 1) / 2 + k
}

/// Inverse of [`pair`].
pub fn unpair(n: u64) -> (u64, u64) {
    let mut s = 0u64;
    while (s + 1) * (s + 2) / 2 <= n {
        s += 1;
    }
    let k = n - s * (s + 1) / 2;
    (s - k, k)
}

/// The level of a dyadic value `v ∈ (0, 1)`: the unique `n` with
/// `2^{-n-1} <= v < 2^{-n}`. `None` for zero or values at least one.
pub fn level_of(v: &Dyadic) -> Option<u32> {
    if v.is_zero() || *v >= Dyadic::one() {
        return None;
    }
    let mut n = 0u32;
    while !(*v >= Dyadic::pow2_neg(n + 1)) {
        n += 1;
    }
    (*v < Dyadic::pow2_neg(n)).then_some(n)
}

/// `φ_-` of `ell1_to_C`: the level sets `{k : f(k) ∈ [2^{-n-1}, 2^{-n})}`,
/// as far as the sum certificate keeps them complete. Entries at or above
/// one truncate.
pub fn levels_of_ell1(f: &Ell1Seq) -> Result<Slalom, Truncation> {
    let residual = f
        .sum_cert
        .checked_sub(&f.partial_sum())
        .unwrap_or_else(|_| Dyadic::zero());
    // Level n is complete once no unseen entry can reach it:
    // residual < 2^{-n-1}. Shallow levels complete first; emit the
    // complete prefix, capped at 64 levels.
    let mut complete = 0u32;
    while complete < 64 && residual < Dyadic::pow2_neg(complete + 1) {
        complete += 1;
    }
    if complete == 0 {
        return Err(Truncation::new(0, "certificate-resolution"));
    }
    let mut traps: Vec<BTreeSet<BigUint>> = vec![BTreeSet::new(); complete as usize];
    for (k, v) in f.prefix.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        if *v >= Dyadic::one() {
            return Err(Truncation::new(k as u64, "entry-at-least-one"));
        }
        let n = level_of(v).expect("nonzero below one");
        if n < complete {
            traps[n as usize].insert(BigUint::from(k));
        }
    }
    let cert = exact_trap_weight(&traps);
    Ok(Slalom::new(traps, cert).expect("exact cert"))
}

fn exact_trap_weight(traps: &[BTreeSet<BigUint>]) -> Dyadic {
    let mut acc = Dyadic::zero();
    for (n, t) in traps.iter().enumerate() {
        acc = acc.add(&Dyadic::from_u64(t.len() as u64).shr(n as u32));
    }
    acc
}

/// `φ_+` of `ell1_to_C`: levelwise maxima `2^{-n}` over traps containing
/// the position.
pub fn slalom_to_ell1_bound(s: &Slalom) -> Ell1Seq {
    let mut len = 0usize;
    for t in &s.traps {
        for k in t {
            if let Some(k) = k.to_u64() {
                len = len.max(k as usize + 1);
            }
        }
    }
    let mut prefix = vec![Dyadic::zero(); len];
    for (n, t) in s.traps.iter().enumerate() {
        for k in t {
            if let Some(k) = k.to_u64() {
                let v = Dyadic::pow2_neg(n as u32);
                if prefix[k as usize] < v {
                    prefix[k as usize] = v;
                }
            }
        }
    }
    let sum = prefix.iter().fold(Dyadic::zero(), |a, v| a.add(v));
    Ell1Seq::new(prefix, sum).expect("exact cert")
}

/// `l1 ⪯ C`.
pub fn m_ell1_to_c() -> Morphism {
    Morphism {
        name: "ell1_to_C".into(),
        source: sys_ell1(),
        target: sys_slalom(),
        phi_minus: Arc::new(|a, _w| {
            let f = a.as_ell1().expect("ell1 carrier");
            Ok(Carrier::Slalom(levels_of_ell1(f)?))
        }),
        phi_plus: Arc::new(|b, _w| {
            let s = b.as_slalom().expect("slalom carrier");
            Ok(Carrier::Ell1(slalom_to_ell1_bound(s)))
        }),
        // Domination is checked at the positions whose value-level lies in
        // the window; other positions say nothing at this window.
        a_check: Some(Arc::new(|a, _b, gb, w| {
            let (f, g) = (a.as_ell1().unwrap(), gb.as_ell1().unwrap());
            forall_window(w.n0, w.n_end, |n| {
                // All positions of level n must be dominated.
                for (k, v) in f.prefix.iter().enumerate() {
                    if level_of(v) == Some(n) {
                        let bound = g.value(k as u32).cloned().unwrap_or_else(Dyadic::zero);
                        if !(*v <= bound) {
                            return Some(false);
                        }
                    }
                }
                Some(true)
            })
        })),
    }
}

/// `φ_-` of `C_to_ell1`: the indicator sequence `2^{-m}` at `pair(m, k)`
/// for `k ∈ S(m)`.
pub fn slalom_to_pair_seq(s: &Slalom) -> Result<Ell1Seq, Truncation> {
    let mut len = 0usize;
    for (m, t) in s.traps.iter().enumerate() {
        for k in t {
            let Some(k) = k.to_u64() else {
                return Err(Truncation::new(m as u64, "entry-overflow"));
            };
            len = len.max(pair(m as u64, k) as usize + 1);
            if len > 1 << 20 {
                return Err(Truncation::new(m as u64, "pairing-span"));
            }
        }
    }
    let mut prefix = vec![Dyadic::zero(); len];
    for (m, t) in s.traps.iter().enumerate() {
        for k in t {
            let k = k.to_u64().expect("checked");
            prefix[pair(m as u64, k) as usize] = Dyadic::pow2_neg(m as u32);
        }
    }
    let sum = prefix.iter().fold(Dyadic::zero(), |a, v| a.add(v));
    Ok(Ell1Seq::new(prefix, sum).expect("exact cert"))
}

/// `φ_+` of `C_to_ell1`: per level `m`, the entries whose paired position
/// carries at least `2^{-m}`.
pub fn pair_seq_to_slalom(g: &Ell1Seq, levels: u32) -> Slalom {
    let mut traps: Vec<BTreeSet<BigUint>> = vec![BTreeSet::new(); levels as usize];
    for (n, v) in g.prefix.iter().enumerate() {
        let (m, k) = unpair(n as u64);
        if m < levels as u64 && *v >= Dyadic::pow2_neg(m as u32) {
            traps[m as usize].insert(BigUint::from(k));
        }
    }
    let cert = exact_trap_weight(&traps);
    Slalom::new(traps, cert).expect("exact cert")
}

/// `C ⪯ l1`.
pub fn m_c_to_ell1() -> Morphism {
    Morphism {
        name: "C_to_ell1".into(),
        source: sys_slalom(),
        target: sys_ell1(),
        phi_minus: Arc::new(|a, _w| {
            let s = a.as_slalom().expect("slalom carrier");
            Ok(Carrier::Ell1(slalom_to_pair_seq(s)?))
        }),
        phi_plus: Arc::new(|b, w| {
            let g = b.as_ell1().expect("ell1 carrier");
            Ok(Carrier::Slalom(pair_seq_to_slalom(g, w.n_end)))
        }),
        // Trap inclusion is asserted for entries whose paired position the
        // hypothesis window actually inspected.
        a_check: Some(Arc::new(|a, _b, gb, w| {
            let (s, t) = (a.as_slalom().unwrap(), gb.as_slalom().unwrap());
            let any_checked = std::cell::Cell::new(false);
            let v = forall_window(0, s.horizon().min(t.horizon()), |m| {
                let (sm, tm) = (s.trap(m)?, t.trap(m)?);
                for k in sm {
                    let kk = k.to_u64()?;
                    let p = pair(m as u64, kk);
                    if p >= w.n0 as u64 && p < w.n_end as u64 {
                        any_checked.set(true);
                        if !tm.contains(k) {
                            return Some(false);
                        }
                    }
                }
                Some(true)
            });
            match v {
                Verdict::Holds if !any_checked.get() => Verdict::Unknown,
                other => other,
            }
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_round_trip() {
        for n in 0..500u64 {
            let (m, k) = unpair(n);
            assert_eq!(pair(m, k), n);
        }
        assert_eq!(pair(0, 0), 0);
    }

    #[test]
    fn threshold_convention() {
        // f(k) = 2^{-k} lands in level k - 1? No: the half-open convention
        // [2^{-n-1}, 2^{-n}) puts 2^{-k} at n = k - 1 since
        // 2^{-k} ∈ [2^{-k}, 2^{-k+1}) means n + 1 = k.
        assert_eq!(level_of(&Dyadic::pow2_neg(3)), Some(2));
        // Strictly inside a level.
        let three_sixteenth = Dyadic::new(3u32.into(), 4);
        assert_eq!(level_of(&three_sixteenth), Some(2));
        assert_eq!(level_of(&Dyadic::zero()), None);
        assert_eq!(level_of(&Dyadic::one()), None);
    }

    #[test]
    fn zero_sequence_gives_empty_traps() {
        let f = Ell1Seq::new(vec![Dyadic::zero(); 8], Dyadic::zero()).unwrap();
        let s = levels_of_ell1(&f).unwrap();
        for n in 0..s.horizon() {
            assert!(s.trap(n).unwrap().is_empty());
        }
    }

    #[test]
    fn ell1_to_c_round_trip_domination() {
        // f with assorted levels, certificate exact (no unseen tail).
        let f = Ell1Seq::new(
            vec![
                Dyadic::pow2_neg(2),
                Dyadic::zero(),
                Dyadic::pow2_neg(4),
                Dyadic::new(3u32.into(), 5), // 3/32, level 3
                Dyadic::pow2_neg(2),
            ],
            Dyadic::one(),
        )
        .unwrap();
        let s = levels_of_ell1(&f).unwrap();
        // Level sets are complete for all n (residual certificate is
        // 1 - partial < huge levels)... check the dominating pullback.
        let g = slalom_to_ell1_bound(&s);
        for (k, v) in f.prefix.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if level_of(v).map(|n| n < s.horizon()) == Some(true) {
                assert!(
                    *v <= *g.value(k as u32).unwrap(),
                    "position {k} not dominated"
                );
            }
        }
    }

    #[test]
    fn c_to_ell1_contract_shape() {
        let s = Slalom::from_u64_traps(
            vec![vec![1], vec![0, 3], vec![2]],
            Dyadic::from_u64(4),
        )
        .unwrap();
        let seq = slalom_to_pair_seq(&s).unwrap();
        // Dominating sequence: g = seq itself.
        let t = pair_seq_to_slalom(&seq, 3);
        for m in 0..3u32 {
            assert!(s.trap(m).unwrap().is_subset(t.trap(m).unwrap()));
        }
    }
}
