//! Selector morphisms: avoidance witnesses turned into morphisms.
//!
//! `nullnotsup_selector`: the greedy descent point `φ_-(f) = avoid(f)`
//! lies outside the coded null set of `f`; if it lands inside the coded
//! set of `g`, then `(N)_f` cannot contain `(N)_g`.
//!
//! `nonM_to_cofM`: a point threaded through the dense tails of a meager
//! code avoids the coded meager set; through containment it avoids every
//! smaller one.

use crate::bits::BitString;
use crate::codecs::meager::meager_avoider;
use crate::codecs::null::{avoid_null, null_stage};
use crate::error::Truncation;
use crate::tukey::morphism::Morphism;
use crate::tukey::{
    exists_tail_capped, sys_add_null, sys_cof_meager, sys_cov_null, sys_non_meager, Carrier,
    Verdict,
};
use std::sync::Arc;

/// Zero-pad a prefix to the window depth (the descent fixes only finitely
/// many coordinates; any extension works).
fn pad(prefix: BitString, depth: u32) -> BitString {
    let mut bits = prefix.bits().to_vec();
    while (bits.len() as u32) < depth {
        bits.push(0);
    }
    BitString::from_bits(bits).expect("depth capped")
}

/// `(N, N, ⊉) ⪯ (R, N, ∈)`.
pub fn m_nullnotsup_selector() -> Morphism {
    Morphism {
        name: "nullnotsup_selector".into(),
        source: sys_add_null(),
        target: sys_cov_null(),
        phi_minus: Arc::new(|a, w| {
            let f = a.as_null().expect("null carrier");
            let tr = avoid_null(f).map_err(|_| Truncation::new(0, "avoid-descent"))?;
            Ok(Carrier::Point {
                prefix: pad(tr.prefix, w.depth),
            })
        }),
        phi_plus: Arc::new(|b, _w| Ok(b.clone())),
        // The avoidance point itself is the witness: it escapes f's stages
        // by construction and sits in g's window tail by hypothesis.
        a_check: Some(Arc::new(|a, _b, gb, w| {
            let (f, g) = (a.as_null().unwrap(), gb.as_null().unwrap());
            let Ok(tr) = avoid_null(f) else {
                return Verdict::Unknown;
            };
            if !tr.invariant_holds() {
                return Verdict::Unknown;
            }
            let x = pad(tr.prefix.clone(), w.depth);
            // Outside f: the prefix cylinder misses the chosen stage.
            if f.horizon() >= 2 {
                let top_f = f.horizon() - 1;
                let Ok(stage) = null_stage(f, tr.m0, top_f) else {
                    return Verdict::Unknown;
                };
                if !stage
                    .intersect(&crate::clopen::ClopenSet::cylinder(tr.prefix.clone()))
                    .is_empty()
                {
                    return Verdict::Unknown;
                }
            }
            // Inside g's window tail.
            if g.horizon() < 2 {
                return Verdict::Unknown;
            }
            match exists_tail_capped(w.n0, w.n_end, g.horizon() - 1, |n| {
                g.level_contains(n, &x)
            }) {
                Verdict::Holds => Verdict::Holds,
                _ => Verdict::Unknown,
            }
        })),
    }
}

/// `(M, R, ∌) ⪯ (M, M, ⊆)`.
pub fn m_nonm_to_cofm() -> Morphism {
    Morphism {
        name: "nonM_to_cofM".into(),
        source: sys_non_meager(),
        target: sys_cof_meager(),
        phi_minus: Arc::new(|a, _w| Ok(a.clone())),
        phi_plus: Arc::new(|b, w| {
            let g = b.as_meager().expect("meager carrier");
            if g.horizon() < 2 {
                return Err(Truncation::new(0, "code-horizon"));
            }
            let top = (g.horizon() - 1).min(w.n_end);
            let z = meager_avoider(g, top, w.depth)
                .map_err(|_| Truncation::new(0, "interval-family-only"))?;
            Ok(Carrier::Point { prefix: z })
        }),
        a_check: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::ClopenSet;
    use crate::codecs::meager::{meager_encode, point_in_dense_stage, MeagerCode};
    use crate::codecs::null::{null_encode, NullCode};
    use crate::codecs::GoodFamilyKind;
    use crate::tree::TreeApprox;
    use crate::tukey::{standard_families, Window};

    #[test]
    fn selector_escapes_and_enters() {
        // f covers the zeros branch; g covers the selector's own prefix.
        let covers: Vec<ClopenSet> = (0..6)
            .map(|n| ClopenSet::cylinder(BitString::from_bits(vec![0; n + 1]).unwrap()))
            .collect();
        let f = null_encode(&covers).unwrap();
        let tr = avoid_null(&f).unwrap();
        let x = pad(tr.prefix.clone(), 16);
        // g: level n covers x's prefix of length n+1.
        let mut g = NullCode::empty(6);
        for n in 0..6u32 {
            let cyl = ClopenSet::cylinder(x.prefix(n as usize + 1));
            g.f[n as usize] = crate::index::ClopenFamily::new(n).index_of(&cyl).unwrap();
        }
        let w = Window::new(1, 5, 16).unwrap();
        let m = m_nullnotsup_selector();
        let fx = m.minus(&Carrier::Null(f.clone()), &w).unwrap();
        // B: the selector point is in g's window tail.
        let b = m.target.eval(&fx, &Carrier::Null(g.clone()), &w);
        assert!(b.is_holds());
        // A: windowed not-superset, via the aligned check.
        let a = m.check_a(&Carrier::Null(f), &Carrier::Null(g), &w);
        assert!(a.is_holds());
    }

    #[test]
    fn meager_avoider_threads_the_tails() {
        let fam = standard_families().interval();
        let trees: Vec<TreeApprox> = (0..8)
            .map(|_| {
                TreeApprox::new(
                    8,
                    ClopenSet::cylinder(BitString::from_bits(vec![0; 8]).unwrap()),
                )
                .unwrap()
            })
            .collect();
        let code = meager_encode(&trees, &fam, 1 << 12).unwrap();
        let top = code.horizon() - 1;
        let z = meager_avoider(&code, top, 24).unwrap();
        for m in 0..top {
            assert_eq!(
                point_in_dense_stage(&code, &fam, &z, m, top),
                Some(true),
                "avoider misses the tail ({m}, {top}]"
            );
        }
    }

    #[test]
    fn containment_to_avoidance() {
        // f = g: containment holds; the avoider of g avoids f as well.
        let f = MeagerCode::new(GoodFamilyKind::Intervals, vec![0, 1, 2, 3, 0, 1, 2, 3]);
        let w = Window::new(1, 7, 24).unwrap();
        let m = m_nonm_to_cofm();
        let z = m.plus(&Carrier::Meager(f.clone()), &w).unwrap();
        let verdict = m.check_a(&Carrier::Meager(f), &z, &w);
        assert!(verdict.is_holds(), "got {verdict:?}");
    }
}
