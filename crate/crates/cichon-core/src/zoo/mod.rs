//! The concrete morphisms behind the diagram's arrows, a name-addressable
//! registry, and the standard seeded samplers for their contract runs.

pub mod baire;
pub mod blocks;
pub mod counting;
pub mod duality;
pub mod ell1_morph;
pub mod meager_c;
pub mod null_c;
pub mod selector;

use crate::bits::BitString;
use crate::clopen::ClopenSet;
use crate::codecs::meager::MeagerCode;
use crate::codecs::null::{avoid_null, NullCode};
use crate::codecs::GoodFamilyKind;
use crate::dyadic::Dyadic;
use crate::ell1::Ell1Seq;
use crate::index::ClopenFamily;
use crate::pideal::{count_profile, IdealElement};
use crate::sampler::Sampler;
use crate::slalom::Slalom;
use crate::tukey::morphism::{compose, Morphism};
use crate::tukey::{standard_families, sys_dominating, Carrier, Window};
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

pub use baire::{m_baire_to_covm, m_dominate_shift, m_meagernotsup_to_baire};
pub use counting::m_ideal_to_counting;
pub use duality::m_covn_to_nonm;
pub use ell1_morph::{m_c_to_ell1, m_ell1_to_c};
pub use meager_c::m_meager_to_c;
pub use null_c::{m_c_to_null, m_null_to_c};
pub use selector::{m_nonm_to_cofm, m_nullnotsup_selector};

/// A deliberately broken morphism kept for negative testing: the pullback
/// collapses every bound to the zero word.
pub fn m_broken_demo() -> Morphism {
    let sys = sys_dominating();
    Morphism {
        name: "broken_demo".into(),
        source: sys.clone(),
        target: sys,
        phi_minus: Arc::new(|a, _| Ok(a.clone())),
        phi_plus: Arc::new(|b, _| {
            let len = b.as_word().map(|w| w.len()).unwrap_or(0);
            Ok(Carrier::Word { word: vec![0; len] })
        }),
        a_check: None,
    }
}

/// The composed arrow `cof(M) -> cof(N)` through the slalom midpoint.
pub fn m_meager_to_null() -> Morphism {
    compose(&m_meager_to_c(), &m_c_to_null()).expect("midpoints match")
}

/// Names of all registered morphisms.
pub fn morphism_names() -> Vec<&'static str> {
    vec![
        "null_to_C",
        "C_to_null",
        "meager_to_C",
        "covN_to_nonM",
        "meagernotsup_to_baire",
        "baire_to_covM",
        "nullnotsup_selector",
        "C_to_ell1",
        "ell1_to_C",
        "ideal_to_counting",
        "dominate_shift",
        "nonM_to_cofM",
        "meager_to_null",
        "broken_demo",
    ]
}

/// Build a registered morphism by name. Names of the form `dual(...)`
/// build the dual of the inner morphism.
pub fn build_morphism(name: &str) -> Option<Morphism> {
    if let Some(inner) = name.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
        return Some(build_morphism(inner)?.dual());
    }
    Some(match name {
        "null_to_C" => m_null_to_c(),
        "C_to_null" => m_c_to_null(),
        "meager_to_C" => m_meager_to_c(),
        "covN_to_nonM" => m_covn_to_nonm(),
        "meagernotsup_to_baire" => m_meagernotsup_to_baire(),
        "baire_to_covM" => m_baire_to_covm(),
        "nullnotsup_selector" => m_nullnotsup_selector(),
        "C_to_ell1" => m_c_to_ell1(),
        "ell1_to_C" => m_ell1_to_c(),
        "ideal_to_counting" => m_ideal_to_counting(),
        "dominate_shift" => m_dominate_shift(),
        "nonM_to_cofM" => m_nonm_to_cofm(),
        "meager_to_null" => m_meager_to_null(),
        "broken_demo" => m_broken_demo(),
        _ => return None,
    })
}

// ---------------------------------------------------------------------
// Standard samplers.
// ---------------------------------------------------------------------

/// A random canonical set of measure at most `2^-level`: one or two
/// cylinders just below the level's bound.
fn random_level_set(rng: &mut ChaCha8Rng, level: u32) -> ClopenSet {
    let two = rng.gen_bool(0.4);
    let len = |rng: &mut ChaCha8Rng, lo: u32| lo + rng.gen_range(0..3);
    let cyl = |rng: &mut ChaCha8Rng, l: u32| {
        let bits: Vec<u8> = (0..l).map(|_| rng.gen_range(0..2u8)).collect();
        BitString::from_bits(bits).expect("depth capped")
    };
    if two {
        let l1 = len(rng, level + 1);
        let c1 = cyl(rng, l1);
        let l2 = len(rng, level + 1);
        let c2 = cyl(rng, l2);
        ClopenSet::from_cylinders([c1, c2])
    } else {
        let l = len(rng, level);
        let c = cyl(rng, l);
        ClopenSet::from_cylinders([c])
    }
}

fn random_null_code(rng: &mut ChaCha8Rng, levels: u32) -> NullCode {
    let mut f = Vec::with_capacity(levels as usize);
    for n in 0..levels {
        if rng.gen_bool(0.25) {
            f.push(BigUint::default());
        } else {
            let set = random_level_set(rng, n);
            f.push(ClopenFamily::new(n).index_of(&set).expect("measure fits"));
        }
    }
    NullCode::new(f)
}

fn random_point(rng: &mut ChaCha8Rng, depth: u32) -> BitString {
    BitString::from_bits((0..depth).map(|_| rng.gen_range(0..2u8)).collect()).unwrap()
}

fn random_interval_code(rng: &mut ChaCha8Rng, levels: u32) -> MeagerCode {
    let f = (0..levels)
        .map(|_| {
            let width = rng.gen_range(1..=3u32);
            let val = rng.gen_range(0..(1u64 << width));
            (1u64 << width) - 2 + val
        })
        .collect();
    MeagerCode::new(GoodFamilyKind::Intervals, f)
}

fn exact_cert(traps: &[BTreeSet<BigUint>]) -> Dyadic {
    let mut acc = Dyadic::zero();
    for (n, t) in traps.iter().enumerate() {
        acc = acc.add(&Dyadic::from_u64(t.len() as u64).shr(n as u32));
    }
    acc
}

fn sampler_null_to_c() -> Sampler {
    Sampler::new(|rng, w| {
        let f = random_null_code(rng, 2 * w.n_end + 2);
        let honest = rng.gen_bool(0.7);
        let mut traps: Vec<BTreeSet<BigUint>> = Vec::new();
        for n in 0..w.n_end {
            let mut t = BTreeSet::new();
            if honest {
                t.insert(f.f[2 * n as usize].clone());
                t.insert(f.f[2 * n as usize + 1].clone());
                if rng.gen_bool(0.3) {
                    let noise = random_level_set(rng, 2 * n);
                    t.insert(ClopenFamily::new(2 * n).index_of(&noise).unwrap());
                }
            } else {
                for _ in 0..rng.gen_range(1..=2) {
                    let noise = random_level_set(rng, 2 * n);
                    t.insert(ClopenFamily::new(2 * n).index_of(&noise).unwrap());
                }
            }
            traps.push(t);
        }
        let cert = exact_cert(&traps);
        (
            Carrier::Null(f),
            Carrier::Slalom(Slalom::new(traps, cert).unwrap()),
        )
    })
}

fn sampler_c_to_null() -> Sampler {
    Sampler::new(|rng, w| {
        let pairs = blocks::pairs_within_depth(w.depth);
        let max_n = pairs.iter().map(|&(n, _)| n).max().unwrap_or(1);
        let levels = (max_n + 1).min(w.n_end);
        let mut traps: Vec<BTreeSet<BigUint>> = vec![BTreeSet::new(); levels as usize];
        for &(n, i) in &pairs {
            if n < levels && rng.gen_bool(0.4) {
                traps[n as usize].insert(BigUint::from(i));
            }
        }
        let cert = exact_cert(&traps);
        let s = Slalom::new(traps, cert).unwrap();
        let b = if rng.gen_bool(0.7) {
            match null_c::encode_block_tails(&s, w.depth) {
                Ok(code) if code.truncated.is_none() => Carrier::Null(code),
                _ => Carrier::Null(random_null_code(rng, w.n_end.min(8))),
            }
        } else {
            Carrier::Null(random_null_code(rng, w.n_end.min(8)))
        };
        (Carrier::Slalom(s), b)
    })
}

fn sampler_meager_to_c() -> Sampler {
    Sampler::new(|rng, _w: &Window| {
        let fams = standard_families();
        let fam = fams.of_kind(GoodFamilyKind::Intersecting);
        let cap = fams.intersecting.budget.n_cap.min(_w.n_end.max(2) - 1);
        let mut f = Vec::new();
        for n in 0..=cap {
            let count = fam.member_count(n).unwrap_or(0).max(1);
            // Low indices name the fattest members, whose intersections
            // stay tractable; mix them with arbitrary picks.
            if rng.gen_bool(0.5) {
                f.push(0);
            } else {
                f.push(rng.gen_range(0..count));
            }
        }
        let code = MeagerCode::new(GoodFamilyKind::Intersecting, f.clone());
        let honest = rng.gen_bool(0.75);
        let mut traps: Vec<BTreeSet<BigUint>> = Vec::new();
        for (n, &idx) in f.iter().enumerate() {
            let mut t = BTreeSet::new();
            let count = fam.member_count(n as u32).unwrap_or(0).max(1);
            if honest {
                t.insert(BigUint::from(idx));
                if n >= 1 && rng.gen_bool(0.4) {
                    t.insert(BigUint::from(rng.gen_range(0..count)));
                }
            } else {
                t.insert(BigUint::from(rng.gen_range(0..count)));
            }
            traps.push(t);
        }
        let cert = exact_cert(&traps);
        (
            Carrier::Meager(code),
            Carrier::Slalom(Slalom::new(traps, cert).unwrap()),
        )
    })
}

fn sampler_covn_to_nonm() -> Sampler {
    Sampler::new(|rng, w| {
        let x = random_point(rng, w.depth);
        let mut yb: Vec<u8> = (0..w.depth).map(|_| rng.gen_range(0..2u8)).collect();
        if rng.gen_bool(0.7) {
            // Copy x on the deepest block (and sometimes one more), so the
            // pair block-matches inside the window.
            let top = duality::blocks_within(w.depth);
            for m in [top, top.saturating_sub(1).max(1)] {
                let start = duality::block_start(m) as usize;
                for i in start..start + m as usize {
                    yb[i] = x.bit(i).unwrap();
                }
                if rng.gen_bool(0.5) {
                    break;
                }
            }
        }
        (
            Carrier::Point { prefix: x },
            Carrier::Point {
                prefix: BitString::from_bits(yb).unwrap(),
            },
        )
    })
}

fn sampler_meagernotsup_to_baire() -> Sampler {
    Sampler::new(|rng, w| {
        let f = random_interval_code(rng, w.n_end + 1);
        let ends = baire::interval_endpoints(&f);
        let g: Vec<u64> = (0..w.n_end as usize + 1)
            .map(|n| {
                if rng.gen_bool(0.6) {
                    ends[n] + 1 + rng.gen_range(0..2)
                } else {
                    (n as u64 + 1).max(ends[n].saturating_sub(1))
                }
            })
            .collect();
        (Carrier::Meager(f), Carrier::Word { word: g })
    })
}

fn sampler_baire_to_covm() -> Sampler {
    Sampler::new(|rng, w| {
        let f: Vec<u64> = (0..w.n_end).map(|_| rng.gen_range(0..8)).collect();
        let y: Vec<u64> = f
            .iter()
            .map(|&v| {
                if rng.gen_bool(0.4) {
                    v + 1 + rng.gen_range(0..2)
                } else {
                    rng.gen_range(0..8)
                }
            })
            .collect();
        (Carrier::Word { word: f }, Carrier::Word { word: y })
    })
}

fn sampler_nullnotsup_selector() -> Sampler {
    Sampler::new(|rng, w| {
        let f = random_null_code(rng, w.n_end + 2);
        let g = if rng.gen_bool(0.7) {
            // Cover the avoidance point of f, so the hypothesis holds.
            let x = avoid_null(&f)
                .map(|tr| tr.prefix)
                .unwrap_or_else(|_| BitString::empty());
            let mut xb = x.bits().to_vec();
            while (xb.len() as u32) < w.depth {
                xb.push(0);
            }
            let x = BitString::from_bits(xb).unwrap();
            let mut g = NullCode::empty(w.n_end + 2);
            for n in 0..g.horizon().min(x.len() as u32) {
                let cyl = ClopenSet::cylinder(x.prefix(n as usize + 1));
                g.f[n as usize] = ClopenFamily::new(n).index_of(&cyl).unwrap();
            }
            g
        } else {
            random_null_code(rng, w.n_end + 2)
        };
        (Carrier::Null(f), Carrier::Null(g))
    })
}

fn sampler_c_to_ell1() -> Sampler {
    Sampler::new(|rng, w| {
        let levels = 6u32.min(w.n_end);
        let mut traps: Vec<BTreeSet<BigUint>> = Vec::new();
        for m in 0..levels as u64 {
            let mut t = BTreeSet::new();
            for _ in 0..rng.gen_range(0..=2) {
                // Keep paired positions inside the window, so the
                // hypothesis side is decidable at this window.
                let k = rng.gen_range(0..8u64);
                if ell1_morph::pair(m, k) < w.n_end as u64 {
                    t.insert(BigUint::from(k));
                }
            }
            traps.push(t);
        }
        let cert = exact_cert(&traps);
        let s = Slalom::new(traps, cert).unwrap();
        let g = if rng.gen_bool(0.7) {
            match ell1_morph::slalom_to_pair_seq(&s) {
                Ok(seq) => seq,
                Err(_) => Ell1Seq::new(vec![], Dyadic::zero()).unwrap(),
            }
        } else {
            let prefix: Vec<Dyadic> = (0..40)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        Dyadic::zero()
                    } else {
                        Dyadic::pow2_neg(rng.gen_range(1..8))
                    }
                })
                .collect();
            let sum = prefix.iter().fold(Dyadic::zero(), |a, v| a.add(v));
            Ell1Seq::new(prefix, sum).unwrap()
        };
        (Carrier::Slalom(s), Carrier::Ell1(g))
    })
}

fn sampler_ell1_to_c() -> Sampler {
    Sampler::new(|rng, w| {
        let prefix: Vec<Dyadic> = (0..w.n_end)
            .map(|_| {
                if rng.gen_bool(0.4) {
                    Dyadic::zero()
                } else {
                    let level = rng.gen_range(1..(w.n_end / 2 + 3));
                    if rng.gen_bool(0.3) {
                        // 3 * 2^{-level-2}: strictly inside its level.
                        Dyadic::new(3u32.into(), level + 2)
                    } else {
                        Dyadic::pow2_neg(level)
                    }
                }
            })
            .collect();
        let sum = prefix.iter().fold(Dyadic::zero(), |a, v| a.add(v));
        let f = Ell1Seq::new(prefix, sum).unwrap();
        let s = if rng.gen_bool(0.7) {
            match ell1_morph::levels_of_ell1(&f) {
                Ok(mut s) => {
                    // Trim to the window so the hypothesis decides there.
                    s.traps.truncate(w.n_end as usize);
                    if rng.gen_bool(0.3) && !s.traps.is_empty() {
                        // Extra noise entry in one trap.
                        let n = rng.gen_range(0..s.traps.len());
                        s.traps[n].insert(BigUint::from(rng.gen_range(0..50u64)));
                    }
                    let cert = exact_cert(&s.traps);
                    Slalom::new(s.traps, cert).unwrap()
                }
                Err(_) => Slalom::new(vec![], Dyadic::zero()).unwrap(),
            }
        } else {
            let mut traps: Vec<BTreeSet<BigUint>> = Vec::new();
            for _ in 0..w.n_end.min(12) {
                let mut t = BTreeSet::new();
                for _ in 0..rng.gen_range(0..=2) {
                    t.insert(BigUint::from(rng.gen_range(0..w.n_end as u64)));
                }
                traps.push(t);
            }
            let cert = exact_cert(&traps);
            Slalom::new(traps, cert).unwrap()
        };
        (Carrier::Ell1(f), Carrier::Slalom(s))
    })
}

fn sampler_ideal_to_counting() -> Sampler {
    Sampler::new(|rng, w| {
        let span = 2 * w.n_end as u64 + 2;
        let mut support = BTreeSet::new();
        for _ in 0..rng.gen_range(0..10) {
            support.insert(rng.gen_range(1..span));
        }
        let x = IdealElement::explicit(support.clone()).unwrap();
        let y_support = if rng.gen_bool(0.8) {
            let mut s = support;
            s.insert(rng.gen_range(1..w.n_end as u64));
            s
        } else {
            let mut s = BTreeSet::new();
            for _ in 0..rng.gen_range(0..10) {
                s.insert(rng.gen_range(1..span));
            }
            s
        };
        let y = IdealElement::explicit(y_support).unwrap();
        let profile = count_profile(&y, w.n_end + 1).unwrap();
        (Carrier::Ideal(x), Carrier::Count { profile })
    })
}

fn sampler_words() -> Sampler {
    Sampler::new(|rng, w| {
        let g: Vec<u64> = (0..w.n_end).map(|_| rng.gen_range(0..10)).collect();
        let f: Vec<u64> = g
            .iter()
            .map(|&v| {
                if rng.gen_bool(0.6) {
                    rng.gen_range(0..=v)
                } else {
                    rng.gen_range(0..10)
                }
            })
            .collect();
        (Carrier::Word { word: f }, Carrier::Word { word: g })
    })
}

fn sampler_nonm_to_cofm() -> Sampler {
    Sampler::new(|rng, w| {
        let f = random_interval_code(rng, w.n_end + 1);
        let g = if rng.gen_bool(0.7) {
            f.clone()
        } else {
            random_interval_code(rng, w.n_end + 1)
        };
        (Carrier::Meager(f), Carrier::Meager(g))
    })
}

fn sampler_meager_to_null() -> Sampler {
    Sampler::new(|rng, w| {
        let (a, _b) = sampler_meager_to_c().pair(rng, w);
        let b = Carrier::Null(random_null_code(rng, w.n_end.min(8)));
        (a, b)
    })
}

/// The standard sampler for a registered morphism.
pub fn standard_sampler(name: &str) -> Option<Sampler> {
    Some(match name {
        "null_to_C" => sampler_null_to_c(),
        "C_to_null" => sampler_c_to_null(),
        "meager_to_C" => sampler_meager_to_c(),
        "covN_to_nonM" => sampler_covn_to_nonm(),
        "meagernotsup_to_baire" => sampler_meagernotsup_to_baire(),
        "baire_to_covM" => sampler_baire_to_covm(),
        "nullnotsup_selector" => sampler_nullnotsup_selector(),
        "C_to_ell1" => sampler_c_to_ell1(),
        "ell1_to_C" => sampler_ell1_to_c(),
        "ideal_to_counting" => sampler_ideal_to_counting(),
        "dominate_shift" | "broken_demo" => sampler_words(),
        "nonM_to_cofM" => sampler_nonm_to_cofm(),
        "meager_to_null" => sampler_meager_to_null(),
        _ => return None,
    })
}

/// Standard acceptance window.
pub fn standard_window() -> Window {
    Window::new(4, 24, 24).expect("static window")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tukey::check::check_contract;

    #[test]
    fn registry_is_total_on_names() {
        for name in morphism_names() {
            assert!(build_morphism(name).is_some(), "missing morphism {name}");
            assert!(standard_sampler(name).is_some(), "missing sampler {name}");
        }
        assert!(build_morphism("dual(null_to_C)").is_some());
        assert!(build_morphism("no_such").is_none());
    }

    #[test]
    fn quick_contract_smoke_small_window() {
        // A fast shakedown on a small window; the full acceptance suite
        // runs the standard window with many more trials.
        let w = Window::new(1, 12, 16).unwrap();
        for name in [
            "null_to_C",
            "covN_to_nonM",
            "baire_to_covM",
            "dominate_shift",
            "ideal_to_counting",
        ] {
            let m = build_morphism(name).unwrap();
            let s = standard_sampler(name).unwrap();
            let rep = check_contract(&m, &s, &w, 300, 11);
            assert_eq!(rep.counts.violated, 0, "{name}: {:?}", rep.violations);
            assert!(
                rep.counts.confirmed > 0,
                "{name} never confirmed: {:?}",
                rep.counts
            );
        }
    }

    #[test]
    fn broken_demo_is_violated() {
        let m = build_morphism("broken_demo").unwrap();
        let s = standard_sampler("broken_demo").unwrap();
        let w = Window::new(1, 8, 16).unwrap();
        let rep = check_contract(&m, &s, &w, 300, 11);
        assert!(rep.counts.violated > 0);
    }
}
