//! Meager-set codes: index functions against a good family. The coded
//! meager set is the complement of `∩_m ∪_{n>m} S^n_{f(n)}`; the tail
//! unions are dense open, so the complement is meager, and every increasing
//! sequence of nowhere dense trees embeds into such a code.

use crate::bits::{basis_cylinder, BitString};
use crate::clopen::ClopenSet;
use crate::codecs::good::{GoodFamily, GoodFamilyKind};
use crate::error::{Error, Result, Truncation};
use crate::tree::TreeApprox;
use serde::{Deserialize, Serialize};

fn kind_meager() -> String {
    "meager".to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeagerCode {
    #[serde(default = "kind_meager")]
    pub kind: String,
    pub family: GoodFamilyKind,
    pub f: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub truncated: Option<Truncation>,
}

impl MeagerCode {
    pub fn new(family: GoodFamilyKind, f: Vec<u64>) -> Self {
        MeagerCode {
            kind: kind_meager(),
            family,
            f,
            truncated: None,
        }
    }

    pub fn horizon(&self) -> u32 {
        self.f.len() as u32
    }

    pub fn level(&self, n: u32) -> Option<u64> {
        self.f.get(n as usize).copied()
    }
}

/// Encode an increasing list of nowhere dense trees: `f(n)` is the least
/// member index with `S^n_{f(n)} ∩ F_n = ∅`. Such an index exists because
/// the complement of `F_n` is open dense and the family enters every dense
/// open set; the search is budgeted and truncates honestly. Killing the
/// whole obstruction is slightly stronger than only killing it inside
/// `U_n`, and it makes the disjointness `∪F ∩ ∩_m ∪_{n>m} S^n_{f(n)} = ∅`
/// hold stage by stage.
pub fn meager_encode(
    trees: &[TreeApprox],
    family: &GoodFamily,
    search_budget: u64,
) -> Result<MeagerCode> {
    for (i, t) in trees.iter().enumerate() {
        if !t.is_nowhere_dense() {
            return Err(Error::NotNowhereDense(i));
        }
        if i > 0 && !trees[i].front().includes(trees[i - 1].front()) {
            return Err(Error::Precondition(format!(
                "tree list not increasing at {i}"
            )));
        }
    }
    let mut f = Vec::new();
    let mut truncated = None;
    for (n, tree) in trees.iter().enumerate() {
        match family.first_member_disjoint(n as u32, tree.front(), search_budget)? {
            Some(m) => f.push(m),
            None => {
                truncated = Some(Truncation::new(n as u64, "member-search-budget"));
                break;
            }
        }
    }
    let mut code = MeagerCode::new(family.kind(), f);
    code.truncated = truncated;
    Ok(code)
}

/// The dense-open stage `∪_{m < n <= up_to} S^n_{f(n)}`, materialized.
pub fn meager_stage(
    code: &MeagerCode,
    family: &GoodFamily,
    m: u32,
    up_to: u32,
    budget: u64,
) -> Result<ClopenSet> {
    if m >= up_to || up_to >= code.horizon() {
        return Err(Error::HorizonExceeded {
            m,
            n: up_to,
            horizon: code.horizon(),
        });
    }
    let mut parts = Vec::new();
    for n in (m + 1)..=up_to {
        let idx = code.level(n).expect("checked range");
        parts.push(family.member_set(n, idx, budget)?);
    }
    Ok(ClopenSet::union_all(parts.iter()))
}

/// Does the stage meet every cylinder of length `d`? Closed form when an
/// interval member with free prefix at least `d` participates.
pub fn stage_dense_at(
    code: &MeagerCode,
    family: &GoodFamily,
    m: u32,
    up_to: u32,
    d: u32,
    budget: u64,
) -> Result<bool> {
    if matches!(family, GoodFamily::Intervals) && up_to < code.horizon() {
        // An interval member at layer n >= d meets every depth-d cylinder.
        if (m + 1..=up_to).any(|n| n >= d) {
            return Ok(true);
        }
    }
    Ok(meager_stage(code, family, m, up_to, budget)?.is_dense_at_depth(d))
}

/// Tri-state: is the point prefix in some `S^n_{f(n)}`, `m < n <= up_to`?
/// This is the window test for "y is outside the coded meager set".
pub fn point_in_dense_stage(
    code: &MeagerCode,
    family: &GoodFamily,
    x: &BitString,
    m: u32,
    up_to: u32,
) -> Option<bool> {
    if up_to >= code.horizon() {
        return None;
    }
    let mut decided = true;
    for n in (m + 1)..=up_to {
        let idx = code.level(n)?;
        match family.point_in_member(n, idx, x).ok()? {
            Some(true) => return Some(true),
            Some(false) => {}
            None => decided = false,
        }
    }
    decided.then_some(false)
}

/// Change of good family: re-index `code` (over `from`) against `to`,
/// taking at level `n` the least `k` with
/// `T^n_k ⊆ ∪_{n <= j < horizon} S^j_{f(j)}`. A witness found against the
/// partial union is sound for the full union by monotonicity.
pub fn change_of_basis(
    code: &MeagerCode,
    from: &GoodFamily,
    to: &GoodFamily,
    search_budget: u64,
    materialize_budget: u64,
) -> Result<MeagerCode> {
    let horizon = code.horizon();
    let mut f = Vec::new();
    let mut truncated = None;
    for n in 0..horizon {
        let mut parts = Vec::new();
        for j in n..horizon {
            let idx = code.level(j).expect("in range");
            parts.push(from.member_set(j, idx, materialize_budget)?);
        }
        let union = ClopenSet::union_all(parts.iter());
        match to.first_member_inside(n, &union, search_budget)? {
            Some(k) => f.push(k),
            None => {
                truncated = Some(Truncation::new(n as u64, "member-search-budget"));
                break;
            }
        }
    }
    let mut out = MeagerCode::new(to.kind(), f);
    out.truncated = truncated;
    Ok(out)
}

/// Greedy selector of a point prefix inside every stage `(m, up_to]`, used
/// by the morphism that turns meager-set containment into avoidance.
/// Patterns are spliced along a chain descending from the top level, each
/// chosen interval ending before the previous chain point starts, so every
/// window tail `(m, up_to]` contains a spliced level and the point lies in
/// its member. Interval families only; the result is at least `min_len`
/// bits long and long enough to close the top pattern.
pub fn meager_avoider(code: &MeagerCode, up_to: u32, min_len: u32) -> Result<BitString> {
    if code.family != GoodFamilyKind::Intervals {
        return Err(Error::Precondition(
            "meager_avoider needs the interval family".into(),
        ));
    }
    if up_to >= code.horizon() || up_to < 1 {
        return Err(Error::HorizonExceeded {
            m: 0,
            n: up_to,
            horizon: code.horizon(),
        });
    }
    let pattern = |n: u32| GoodFamily::interval_pattern(n, code.level(n).expect("in range"));
    let mut chain = vec![up_to];
    let mut cur = up_to;
    loop {
        // Largest level whose interval closes before the current chain
        // point's interval opens.
        let next = (1..cur).rev().find(|&n| pattern(n).0 <= cur as u64);
        match next {
            Some(n) => {
                chain.push(n);
                cur = n;
            }
            None => break,
        }
    }
    let len = chain
        .iter()
        .map(|&n| pattern(n).0)
        .max()
        .unwrap_or(0)
        .max(min_len as u64) as usize;
    let mut bits = vec![0u8; len];
    for &n in &chain {
        let (k, s) = pattern(n);
        for (off, i) in (n as u64..k).enumerate() {
            bits[i as usize] = s.bit(off).unwrap();
        }
    }
    BitString::from_bits(bits)
}

/// Checks the encoder's defining property level by level:
/// `U_n ∩ S^n_{f(n)} ∩ F_n = ∅` (implied by the stronger full
/// disjointness the encoder searches for).
pub fn encoder_kills_obstruction(
    code: &MeagerCode,
    family: &GoodFamily,
    trees: &[TreeApprox],
) -> Result<bool> {
    for n in 0..code.horizon() {
        let idx = code.level(n).expect("in range");
        let tree = match trees.get(n as usize) {
            Some(t) => t,
            None => break,
        };
        let u = ClopenSet::cylinder(basis_cylinder(n as u64));
        let obstruction = tree.front().intersect(&u);
        if family.member_meets(n, idx, &obstruction)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codecs::good::{IntersectingBudget, IntersectingFamily};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn zeros_tree(depth: u32) -> TreeApprox {
        TreeApprox::new(
            depth,
            ClopenSet::cylinder(BitString::from_bits(vec![0; depth as usize]).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn empty_trees_pick_first_members() {
        let fam = GoodFamily::Intervals;
        let trees = vec![TreeApprox::empty(4), TreeApprox::empty(4)];
        let code = meager_encode(&trees, &fam, 1 << 10).unwrap();
        // With no obstruction the least member (index 0) is disjoint.
        assert_eq!(code.f, vec![0, 0]);
        assert!(encoder_kills_obstruction(&code, &fam, &trees).unwrap());
    }

    #[test]
    fn rejects_somewhere_dense_tree() {
        let fat = TreeApprox::new(
            3,
            ClopenSet::from_cylinders([bs("000"), bs("001"), bs("010"), bs("011")]),
        )
        .unwrap();
        // The front fills [0], so it is not nowhere dense at depth 3.
        let r = meager_encode(&[fat], &GoodFamily::Intervals, 1 << 10);
        assert!(matches!(r, Err(Error::NotNowhereDense(0))));
    }

    #[test]
    fn zeros_branch_is_killed_stagewise() {
        let fam = GoodFamily::Intervals;
        let trees: Vec<TreeApprox> = (0..6).map(|_| zeros_tree(8)).collect();
        let code = meager_encode(&trees, &fam, 1 << 12).unwrap();
        assert!(code.truncated.is_none());
        assert!(encoder_kills_obstruction(&code, &fam, &trees).unwrap());
        // Disjointness holds at every finite stage.
        let top = code.horizon() - 1;
        for m in 0..top {
            let stage = meager_stage(&code, &fam, m, top, 1 << 20).unwrap();
            let kill = stage.intersect(trees[m as usize].front());
            assert!(kill.is_empty(), "stage ({m},{top}] meets the obstruction");
        }
        // The coded obstruction avoids the all-zeros branch in particular.
        let zeros = BitString::from_bits(vec![0; 12]).unwrap();
        for n in 0..code.horizon() {
            let idx = code.level(n).unwrap();
            assert_eq!(
                fam.point_in_member(n, idx, &zeros).unwrap(),
                Some(false),
                "S^{n}_{idx} still contains the zero branch"
            );
        }
    }

    #[test]
    fn stages_are_dense() {
        let fam = GoodFamily::Intervals;
        let trees: Vec<TreeApprox> = (0..8).map(|_| zeros_tree(8)).collect();
        let code = meager_encode(&trees, &fam, 1 << 12).unwrap();
        let top = code.horizon() - 1;
        for m in 0..top.min(4) {
            assert!(stage_dense_at(&code, &fam, m, top, 3, 1 << 20).unwrap());
        }
        // Single-member stage example: up_to = m + 1.
        let single = meager_stage(&code, &fam, 2, 3, 1 << 20).unwrap();
        let (_k, s) = GoodFamily::interval_pattern(3, code.level(3).unwrap());
        let member = GoodFamily::Intervals.member_set(3, code.level(3).unwrap(), 1 << 16).unwrap();
        assert_eq!(single, member);
        assert!(s.len() >= 1);
    }

    #[test]
    fn change_of_basis_round_trip_soundness() {
        let fam = GoodFamily::Intervals;
        let trees: Vec<TreeApprox> = (0..5).map(|_| zeros_tree(8)).collect();
        let code = meager_encode(&trees, &fam, 1 << 12).unwrap();
        // Identity-like self-map: every produced index names a member
        // inside the tail union.
        let out = change_of_basis(&code, &fam, &fam, 1 << 12, 1 << 20).unwrap();
        assert!(out.truncated.is_none());
        for n in 0..out.horizon() {
            let mut parts = Vec::new();
            for j in n..code.horizon() {
                parts.push(fam.member_set(j, code.level(j).unwrap(), 1 << 20).unwrap());
            }
            let union = ClopenSet::union_all(parts.iter());
            assert!(fam
                .member_inside(n, out.level(n).unwrap(), &union)
                .unwrap());
        }
        // Interval -> intersecting, small horizon: produced indices validate.
        let inter = GoodFamily::Intersecting(IntersectingFamily::build(IntersectingBudget {
            n_cap: 2,
            chains_per_layer: 8,
            ..Default::default()
        }));
        let short = MeagerCode::new(GoodFamilyKind::Intervals, code.f[..3].to_vec());
        let out = change_of_basis(&short, &fam, &inter, 8, 1 << 20).unwrap();
        for n in 0..out.horizon() {
            let mut parts = Vec::new();
            for j in n..short.horizon() {
                parts.push(fam.member_set(j, short.level(j).unwrap(), 1 << 20).unwrap());
            }
            let union = ClopenSet::union_all(parts.iter());
            assert!(inter
                .member_inside(n, out.level(n).unwrap(), &union)
                .unwrap());
        }
    }

    #[test]
    fn truncation_on_tiny_budget() {
        // A budget of one member is exhausted as soon as member 0 meets the
        // obstruction.
        let fam = GoodFamily::Intervals;
        let tree = TreeApprox::new(
            4,
            ClopenSet::from_cylinders([bs("0000")]),
        )
        .unwrap();
        let code = meager_encode(&[tree], &fam, 1).unwrap();
        assert!(code.truncated.is_some());
    }

    #[test]
    fn json_wire_form() {
        let code = MeagerCode::new(GoodFamilyKind::Intervals, vec![3, 1, 4]);
        let s = serde_json::to_string(&code).unwrap();
        assert_eq!(s, r#"{"kind":"meager","family":"intervals","f":[3,1,4]}"#);
        let back: MeagerCode = serde_json::from_str(&s).unwrap();
        assert_eq!(back, code);
    }
}
