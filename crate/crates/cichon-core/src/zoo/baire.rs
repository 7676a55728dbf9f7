//! Morphisms in and out of Baire space.
//!
//! `meagernotsup_to_baire`: interval-family meager codes project to the
//! right endpoints of their domains; a strictly increasing word `g` pulls
//! back to the code of `{x : every window [n, g(n)) eventually contains a
//! nonzero bit}`. When the endpoints dip below `g` infinitely often, a
//! witness real follows the code's patterns on a sparse chain and is
//! one elsewhere.
//!
//! `baire_to_covM`: a word bounds the Baire-meager set of eventually
//! dominated sequences; escaping that set is literally the bounding
//! relation.
//!
//! `dominate_shift`: domination transports to the dual by bumping the
//! bound by one.

use crate::bits::BitString;
use crate::codecs::good::GoodFamily;
use crate::codecs::meager::MeagerCode;
use crate::codecs::GoodFamilyKind;
use crate::error::Truncation;
use crate::tukey::morphism::Morphism;
use crate::tukey::{
    sys_add_meager, sys_baire_meager, sys_bounding, sys_dominating, BaireMeagerSet, Carrier,
    Verdict, Window,
};
use std::sync::Arc;

/// Right endpoints of the interval domains: `φ_-(f)(n) = k_n` where
/// `dom(S^n_{f(n)}) = [n, k_n)`.
pub fn interval_endpoints(f: &MeagerCode) -> Vec<u64> {
    f.f
        .iter()
        .enumerate()
        .map(|(n, &m)| {
            let (k, _s) = GoodFamily::interval_pattern(n as u32, m);
            k
        })
        .collect()
}

/// Normalize a word to a strictly increasing one with `g(n) > n`
/// (running maximum plus the diagonal), as the pullback needs.
pub fn normalize_increasing(g: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(g.len());
    let mut prev = 0u64;
    for (n, &v) in g.iter().enumerate() {
        let lo = (n as u64 + 1).max(prev + 1);
        let w = v.max(lo);
        out.push(w);
        prev = w;
    }
    out
}

/// `φ_+(g)`: the interval code of `{x : for all large n, some bit of x on
/// [n, g(n)) is nonzero}` — level `n` holds the all-zero pattern on
/// `[n, g(n))`.
pub fn zero_window_code(g: &[u64]) -> MeagerCode {
    let g = normalize_increasing(g);
    let f = g
        .iter()
        .enumerate()
        .map(|(n, &k)| {
            let width = (k - n as u64) as usize;
            let zeros = BitString::from_bits(vec![0; width]).expect("width capped");
            super::duality::interval_index_of(&zeros)
        })
        .collect();
    MeagerCode::new(GoodFamilyKind::Intervals, f)
}

/// The witness real of the endpoint argument: follows `f`'s patterns on a
/// sparse chain `n_1 < n_2 < ...` where the endpoints dip under `g`, and
/// is one everywhere else. Returns the chain alongside the real.
pub fn build_witness(f: &MeagerCode, g: &[u64], w: &Window) -> Option<(BitString, Vec<u32>)> {
    let ends = interval_endpoints(f);
    let g = normalize_increasing(g);
    let mut bits = vec![1u8; w.depth as usize];
    let mut chain = Vec::new();
    let mut n = w.n0.max(1);
    while (n as usize) < g.len().min(ends.len()).min(w.n_end as usize) {
        let k = ends[n as usize];
        if k < g[n as usize] && k <= w.depth as u64 {
            let (_k, s) = GoodFamily::interval_pattern(n, f.f[n as usize]);
            for (off, i) in (n as u64..k).enumerate() {
                bits[i as usize] = s.bit(off).unwrap_or(1);
            }
            chain.push(n);
            // Jump past g(n) so later windows reach a fresh coordinate.
            n = (g[n as usize] as u32).max(n + 1);
        } else {
            n += 1;
        }
    }
    if chain.is_empty() {
        return None;
    }
    Some((BitString::from_bits(bits).ok()?, chain))
}

/// `(M, M, ⊉) ⪯ (ω^ω, ω^ω, ⋡*)`.
pub fn m_meagernotsup_to_baire() -> Morphism {
    Morphism {
        name: "meagernotsup_to_baire".into(),
        source: sys_add_meager(),
        target: sys_bounding(),
        phi_minus: Arc::new(|a, _w| {
            let f = a.as_meager().expect("meager carrier");
            if f.family != GoodFamilyKind::Intervals {
                return Err(Truncation::new(0, "interval-family-only"));
            }
            Ok(Carrier::Word {
                word: interval_endpoints(f),
            })
        }),
        phi_plus: Arc::new(|b, _w| {
            let g = b.as_word().expect("word carrier");
            Ok(Carrier::Meager(zero_window_code(g)))
        }),
        // Verified witness: z matches f's pattern somewhere in the window
        // (so z escapes no tail of f's dense part: z is in f's coded
        // meager complement... precisely, z witnesses that the coded set
        // of h is not inside the coded set of f).
        a_check: Some(Arc::new(|a, _b, hb, w| {
            let f = a.as_meager().unwrap();
            let h = hb.as_meager().unwrap();
            let ends = interval_endpoints(h);
            let Some((z, chain)) = build_witness(f, &ends, w) else {
                return Verdict::Unknown;
            };
            // z is in the coded meager set of f's complement side: it
            // matches f's pattern at each chain point.
            for &n in &chain {
                let (k, s) = GoodFamily::interval_pattern(n, f.f[n as usize]);
                for (off, i) in (n as u64..k).enumerate() {
                    if z.bit(i as usize) != s.bit(off) {
                        return Verdict::Unknown;
                    }
                }
            }
            // z has a nonzero bit in every window [n, g(n)) that fits the
            // depth: z stays out of h's coded meager set.
            let g = normalize_increasing(&ends);
            for n in w.n0..w.n_end.min(g.len() as u32) {
                let hi = g[n as usize].min(w.depth as u64);
                if (n as u64) >= hi {
                    continue;
                }
                let any_nonzero = (n as u64..hi).any(|i| z.bit(i as usize) == Some(1));
                if !any_nonzero {
                    return Verdict::Unknown;
                }
            }
            Verdict::Holds
        })),
    }
}

/// `(ω^ω, ω^ω, ⋡*) ⪯ (M_Baire, ω^ω, ∌)`.
pub fn m_baire_to_covm() -> Morphism {
    Morphism {
        name: "baire_to_covM".into(),
        source: sys_bounding(),
        target: sys_baire_meager(),
        phi_minus: Arc::new(|a, _w| {
            let f = a.as_word().expect("word carrier");
            Ok(Carrier::BaireMeager(BaireMeagerSet::EventuallyBelow {
                bound: f.to_vec(),
            }))
        }),
        phi_plus: Arc::new(|b, _w| Ok(b.clone())),
        a_check: None,
    }
}

/// `(ω^ω, ω^ω, ⋡*) ⪯ (ω^ω, ω^ω, <=*)`: the self-dual shift.
pub fn m_dominate_shift() -> Morphism {
    Morphism {
        name: "dominate_shift".into(),
        source: sys_bounding(),
        target: sys_dominating(),
        phi_minus: Arc::new(|a, _w| Ok(a.clone())),
        phi_plus: Arc::new(|b, _w| {
            let g = b.as_word().expect("word carrier");
            Ok(Carrier::Word {
                word: g.iter().map(|&v| v.saturating_add(1)).collect(),
            })
        }),
        a_check: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_read_back() {
        // f(n) with domain [n, n+1): width 1, pattern "0" or "1".
        let f = MeagerCode::new(GoodFamilyKind::Intervals, vec![0, 1, 0, 1]);
        assert_eq!(interval_endpoints(&f), vec![1, 2, 3, 4]);
        // Width-2 patterns land one block later.
        let f2 = MeagerCode::new(GoodFamilyKind::Intervals, vec![2, 3]);
        assert_eq!(interval_endpoints(&f2), vec![2, 3]);
    }

    #[test]
    fn normalization_is_strictly_increasing_above_diagonal() {
        let g = normalize_increasing(&[5, 1, 1, 9, 2]);
        assert_eq!(g, vec![5, 6, 7, 9, 10]);
        for (n, &v) in g.iter().enumerate() {
            assert!(v > n as u64);
        }
    }

    #[test]
    fn witness_matches_patterns_and_escapes_windows() {
        let w = Window::new(1, 12, 24).unwrap();
        // Interval code with width-2 patterns ("00", "01", "10", "11"
        // cycle), endpoints n+2.
        let f = MeagerCode::new(
            GoodFamilyKind::Intervals,
            (0..12).map(|n| 2 + (n % 4) as u64).collect(),
        );
        // g well above the endpoints.
        let g: Vec<u64> = (0..12).map(|n| n + 5).collect();
        let (z, chain) = build_witness(&f, &g, &w).expect("witness exists");
        assert!(!chain.is_empty());
        for &n in &chain {
            let (k, s) = GoodFamily::interval_pattern(n, f.f[n as usize]);
            for (off, i) in (n as u64..k).enumerate() {
                assert_eq!(z.bit(i as usize), s.bit(off));
            }
        }
        // Off-chain coordinates are 1, so every [n, g(n)) window catches a
        // nonzero bit.
        let gn = normalize_increasing(&g);
        for n in 1..11u64 {
            let hi = gn[n as usize].min(24);
            assert!((n..hi).any(|i| z.bit(i as usize) == Some(1)));
        }
    }

    #[test]
    fn zero_window_code_chases_g() {
        let g = vec![3u64, 4, 5];
        let h = zero_window_code(&g);
        let ends = interval_endpoints(&h);
        assert_eq!(ends, normalize_increasing(&g));
    }
}
