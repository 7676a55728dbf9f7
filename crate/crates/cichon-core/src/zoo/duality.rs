//! The translation-duality morphism `(R, N, ∈) ⪯ (M, R, ∌)`.
//!
//! The pivot set is `B = {x : x is zero on infinitely many blocks I_n}`
//! with `I_n` the consecutive blocks of length `n` (`I_n` starts at
//! `n(n-1)/2`). `B` is null (block-zero events have measure `2^-n`) and
//! its complement is meager. Both translates are coded exactly:
//! `φ_-(x)` codes the meager complement of `B ⊕ x` over the interval
//! family, and `φ_+(y)` codes the null set `B ⊕ y` level by level. The
//! symmetry `y ∈ B ⊕ x iff x ∈ B ⊕ y` carries the contract.

use crate::bits::BitString;
use crate::codecs::meager::MeagerCode;
use crate::codecs::null::NullCode;
use crate::codecs::GoodFamilyKind;
use crate::error::Truncation;
use crate::index::ClopenFamily;
use crate::tukey::morphism::Morphism;
use crate::tukey::{sys_cov_null, sys_non_meager, Carrier};
use std::sync::Arc;

/// Start coordinate of block `I_n` (`n >= 1`): `n(n-1)/2`.
pub fn block_start(n: u32) -> u64 {
    (n as u64) * (n as u64 - 1) / 2
}

/// Largest block index fully below the depth.
pub fn blocks_within(depth: u32) -> u32 {
    let mut n = 1;
    while block_start(n + 1) + (n as u64 + 1) <= depth as u64 {
        n += 1;
    }
    n
}

/// Interval-family index of the pattern `s` on `[start, start+|s|)`.
pub fn interval_index_of(s: &BitString) -> u64 {
    let i = s.len() as u64;
    (1u64 << i) - 2 + s.value() as u64
}

/// `φ_-(x)`: the meager complement of `B ⊕ x`, coded over the interval
/// family. Level `n` fixes `x`'s pattern on `[n, start(m'+1))` where `m'`
/// is the first block starting at or after `n`; avoiding the pattern on
/// the sub-block `I_{m'}` forces avoidance of the whole domain, so points
/// eventually avoiding all `x`-blocks land in the coded meager set.
pub fn meager_code_of_translate(x: &BitString) -> Result<MeagerCode, Truncation> {
    let depth = x.len() as u64;
    let mut f = Vec::new();
    for n in 0u64.. {
        // First block index with start >= n.
        let mut m = 1u32;
        while block_start(m) < n {
            m += 1;
        }
        let end = block_start(m + 1);
        if end > depth {
            break;
        }
        let s = x.slice(n as usize, end as usize).expect("within depth");
        f.push(interval_index_of(&s));
    }
    if f.is_empty() {
        return Err(Truncation::new(0, "depth-below-block-horizon"));
    }
    Ok(MeagerCode::new(GoodFamilyKind::Intervals, f))
}

/// `φ_+(y)`: the null set `B ⊕ y`, coded level by level: level `n` is the
/// pattern set `{z : z agrees with y on I_n}`, of measure exactly `2^-n`.
pub fn null_code_of_translate(y: &BitString) -> Result<NullCode, Truncation> {
    let top = blocks_within(y.len() as u32);
    if top < 1 {
        return Err(Truncation::new(0, "depth-below-block-horizon"));
    }
    let mut f = vec![num_bigint::BigUint::default()]; // level 0: empty set
    for n in 1..=top {
        let start = block_start(n);
        let s = y
            .slice(start as usize, (start + n as u64) as usize)
            .expect("within depth");
        let idx = ClopenFamily::new(n)
            .index_of_pattern(start, s)
            .map_err(|_| Truncation::new(n as u64, "pattern-level"))?;
        f.push(idx);
    }
    Ok(NullCode::new(f))
}

/// `(R, N, ∈) ⪯ (M, R, ∌)`.
pub fn m_covn_to_nonm() -> Morphism {
    Morphism {
        name: "covN_to_nonM".into(),
        source: sys_cov_null(),
        target: sys_non_meager(),
        phi_minus: Arc::new(|a, _w| {
            let x = a.as_point().expect("point carrier");
            Ok(Carrier::Meager(meager_code_of_translate(x)?))
        }),
        phi_plus: Arc::new(|b, _w| {
            let y = b.as_point().expect("point carrier");
            Ok(Carrier::Null(null_code_of_translate(y)?))
        }),
        // The generic evaluator aligns: a full-domain match at meager
        // level n includes a block match, and block matches are symmetric
        // in x and y.
        a_check: None,
    }
}
