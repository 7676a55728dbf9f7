//! `M ⪯ C` over the intersecting family: `φ_-` reads a meager code as the
//! slalom of its singleton indices; `φ_+` re-encodes a slalom as a meager
//! code whose dense tails sit inside the unions of trap intersections.
//! The trap discipline `|S(n)| <= 2^n` keeps those intersections nonempty.

use crate::clopen::ClopenSet;
use crate::codecs::good::GoodFamily;
use crate::codecs::meager::MeagerCode;
use crate::codecs::GoodFamilyKind;
use crate::dyadic::Dyadic;
use crate::error::Truncation;
use crate::slalom::Slalom;
use crate::tukey::morphism::Morphism;
use crate::tukey::{forall_window, standard_families, Carrier};
use num_bigint::BigUint;
use std::collections::BTreeSet;
use std::sync::Arc;

const MEMBER_BUDGET: u64 = 1 << 18;

/// `φ_-`: the code itself, as a slalom of singletons.
pub fn code_as_slalom(f: &MeagerCode) -> Slalom {
    let traps: Vec<BTreeSet<BigUint>> = f
        .f
        .iter()
        .map(|&m| [BigUint::from(m)].into_iter().collect())
        .collect();
    Slalom::new(traps, Dyadic::from_u64(2)).expect("singleton weight")
}

/// The open union `∪_{n in (level, horizon)} ∩_{i in S(n)} S^n_i`,
/// materialized over the intersecting family. `None` when some trap is
/// unusable (too big, undecodable, or beyond the family cap).
fn trap_intersection_union(s: &Slalom, level: u32, fam: &GoodFamily) -> Option<ClopenSet> {
    let mut parts = Vec::new();
    for n in (level + 1)..s.horizon() {
        let trap = s.trap(n)?;
        if trap.is_empty() {
            continue;
        }
        if n < 63 && trap.len() > 1usize << n {
            return None;
        }
        let mut meet: Option<ClopenSet> = None;
        for idx in trap {
            let i = u64::try_from(idx).ok()?;
            let member = fam.member_set(n, i, MEMBER_BUDGET).ok()?;
            meet = Some(match meet {
                None => member,
                Some(m) => m.intersect(&member),
            });
        }
        parts.push(meet?);
    }
    Some(ClopenSet::union_all(parts.iter()))
}

/// `φ_+`: for each level, the least member inside the union of deeper
/// trap intersections. Truncates at the first level the family cannot
/// serve.
pub fn slalom_to_meager(s: &Slalom) -> Result<MeagerCode, Truncation> {
    let fams = standard_families();
    let fam = fams.of_kind(GoodFamilyKind::Intersecting);
    let mut f = Vec::new();
    let mut truncated = None;
    for level in 0..s.horizon().saturating_sub(1) {
        let Some(open) = trap_intersection_union(s, level, &fam) else {
            truncated = Some(Truncation::new(level as u64, "trap-discipline"));
            break;
        };
        let budget = fam.member_count(level).unwrap_or(0);
        match fam.first_member_inside(level, &open, budget).ok().flatten() {
            Some(m) => f.push(m),
            None => {
                truncated = Some(Truncation::new(level as u64, "member-search"));
                break;
            }
        }
    }
    let mut code = MeagerCode::new(GoodFamilyKind::Intersecting, f);
    code.truncated = truncated;
    Ok(code)
}

/// `M ⪯ C`.
pub fn m_meager_to_c() -> Morphism {
    Morphism {
        name: "meager_to_C".into(),
        source: crate::tukey::sys_cof_meager(),
        target: crate::tukey::sys_slalom(),
        phi_minus: Arc::new(|a, _w| {
            let f = a.as_meager().expect("meager carrier");
            Ok(Carrier::Slalom(code_as_slalom(f)))
        }),
        phi_plus: Arc::new(|b, _w| {
            let s = b.as_slalom().expect("slalom carrier");
            Ok(Carrier::Meager(slalom_to_meager(s)?))
        }),
        // Certificate per level: the member chosen for h sits inside the
        // union of deeper members picked by f. This witnesses the stage
        // inclusion of the coded meager sets level by level.
        a_check: Some(Arc::new(|a, _b, hb, w| {
            let (f, h) = (a.as_meager().unwrap(), hb.as_meager().unwrap());
            let fams = standard_families();
            let fam_f = fams.of_kind(f.family);
            let fam_h = fams.of_kind(h.family);
            // The construction certifies a level against strictly deeper
            // traps, so the deepest window level has nothing to certify
            // against: the aligned window loses one level.
            forall_window(w.n0, w.n_end.saturating_sub(1), |level| {
                let hm = h.level(level)?;
                if h.truncated.as_ref().map(|t| t.at <= level as u64) == Some(true) {
                    return None;
                }
                let mut parts = Vec::new();
                for n in (level + 1)..f.horizon() {
                    let fm = f.level(n)?;
                    parts.push(fam_f.member_set(n, fm, MEMBER_BUDGET).ok()?);
                }
                let union = ClopenSet::union_all(parts.iter());
                fam_h.member_inside(level, hm, &union).ok()
            })
        })),
    }
}
