//! Block-supported independent clopen sets `G^n_i = {x : x is 0 on
//! block(n, i)}` with pairwise disjoint coordinate blocks, `|block(n,i)| =
//! n`, so `μ(G^n_i) = 2^-n` and any finite selection is probabilistically
//! independent (measures multiply).

use crate::bits::BitString;
use crate::index::ClopenExpr;
use std::ops::Range;

/// Coordinate block of the pair `(n, i)`, `n >= 1`. Pairs are laid out on
/// the diagonal order `(n + i, n)`, so low diagonals sit near the root.
pub fn block(n: u32, i: u32) -> Range<u64> {
    assert!(n >= 1, "block sizes start at 1");
    let mut start = 0u64;
    for diag in 2.. {
        for nn in 1..diag {
            let ii = diag - 1 - nn;
            if (nn, ii) == (n, i) {
                return start..start + n as u64;
            }
            start += nn as u64;
        }
    }
    unreachable!()
}

/// All pairs `(n, i)` whose block fits under the given depth.
pub fn pairs_within_depth(depth: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut start = 0u64;
    'outer: for diag in 2.. {
        for nn in 1..diag {
            let ii = diag - 1 - nn;
            if start + nn as u64 > depth as u64 {
                break 'outer;
            }
            out.push((nn, ii));
            start += nn as u64;
        }
    }
    out
}

/// The set `G^n_i` as a lazy expression: the all-zero pattern on the
/// block.
pub fn zero_set_expr(n: u32, i: u32) -> ClopenExpr {
    let b = block(n, i);
    ClopenExpr::Pattern {
        start: b.start,
        bits: BitString::from_bits(vec![0; n as usize]).expect("block size capped"),
    }
}

/// Tri-state: does the prefix lie in `G^n_i`?
pub fn prefix_in_zero_set(n: u32, i: u32, x: &BitString) -> Option<bool> {
    zero_set_expr(n, i).contains_point_prefix(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::ClopenSet;
    use crate::dyadic::Dyadic;

    #[test]
    fn blocks_are_disjoint_and_sized() {
        let pairs = pairs_within_depth(40);
        let mut seen: Vec<Range<u64>> = Vec::new();
        for &(n, i) in &pairs {
            let b = block(n, i);
            assert_eq!(b.end - b.start, n as u64);
            for s in &seen {
                assert!(b.end <= s.start || s.end <= b.start, "blocks overlap");
            }
            seen.push(b);
        }
        assert!(pairs.len() >= 8);
    }

    #[test]
    fn zero_sets_have_product_measures() {
        // Any selection of distinct pairs within depth 16: the measure of
        // the intersection is the product of the measures.
        let pairs = pairs_within_depth(16);
        let sets: Vec<ClopenSet> = pairs
            .iter()
            .map(|&(n, i)| zero_set_expr(n, i).materialize(1 << 20).unwrap())
            .collect();
        for (j, &(nj, _)) in pairs.iter().enumerate() {
            assert_eq!(sets[j].measure(), Dyadic::pow2_neg(nj));
        }
        // Pairwise and a few triple selections.
        for j in 0..sets.len() {
            for k in (j + 1)..sets.len() {
                let meet = sets[j].intersect(&sets[k]);
                assert_eq!(meet.measure(), sets[j].measure().mul(&sets[k].measure()));
            }
        }
        let triple = sets[0].intersect(&sets[1]).intersect(&sets[2]);
        assert_eq!(
            triple.measure(),
            sets[0]
                .measure()
                .mul(&sets[1].measure())
                .mul(&sets[2].measure())
        );
    }
}
