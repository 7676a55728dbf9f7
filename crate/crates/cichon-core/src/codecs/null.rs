//! Null-set codes: index functions `n -> m` selecting `C^n_{f(n)}` of
//! measure at most `2^-n`. Every tail union `∪_{n>m} C^n_{f(n)}` then has
//! measure at most `2^-m`, so the coded set `∩_m ∪_{n>m} C^n_{f(n)}` is
//! null, and conversely every cover list embeds into such a code.

use crate::bits::BitString;
use crate::clopen::{tilde_decomposition, ClopenSet};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result, Truncation};
use crate::index::ClopenFamily;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

fn kind_null() -> String {
    "null".to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullCode {
    #[serde(default = "kind_null")]
    pub kind: String,
    #[serde(with = "crate::json_int::biguint_vec")]
    pub f: Vec<BigUint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub truncated: Option<Truncation>,
}

impl NullCode {
    pub fn new(f: Vec<BigUint>) -> Self {
        NullCode {
            kind: kind_null(),
            f,
            truncated: None,
        }
    }

    /// The code of the empty null set with the given number of levels.
    pub fn empty(levels: u32) -> Self {
        NullCode::new(vec![BigUint::default(); levels as usize])
    }

    /// Largest usable level index plus one (number of defined levels).
    pub fn horizon(&self) -> u32 {
        self.f.len() as u32
    }

    pub fn level_index(&self, n: u32) -> Option<&BigUint> {
        self.f.get(n as usize)
    }

    /// The clopen set `C^n_{f(n)}`, materialized.
    pub fn level_set(&self, n: u32) -> Result<ClopenSet> {
        match self.f.get(n as usize) {
            None => Err(Error::HorizonExceeded {
                m: n,
                n,
                horizon: self.horizon(),
            }),
            Some(m) => ClopenFamily::new(n).member(m),
        }
    }

    /// Tri-state membership of a point prefix at level `n`.
    pub fn level_contains(&self, n: u32, x: &BitString) -> Option<bool> {
        let m = self.f.get(n as usize)?;
        ClopenFamily::new(n).member_contains(m, x)
    }
}

/// Encode a cover list into a null code.
///
/// `covers[n]` must have measure at most `2^-n`. The stems of all covers
/// are enumerated in dictionary order as `t_0 < t_1 < ...`; cut points
/// `h(n+1) = min{k > h(n) : Σ_{j>=k} μ[t_j] <= 2^-(n+1)}` (with `h(0)=0`)
/// group the list into blocks `D_n = ∪{[t_j] : h(n) <= j <= h(n+1)}`, each
/// of measure at most `2^-n`, and `f(n)` names `D_n` in the level-`n`
/// family. A point that infinitely many distinct stems cover lands in
/// every tail stage; in particular every point of `∩ covers` does, up to
/// the resolution of the finite input.
pub fn null_encode(covers: &[ClopenSet]) -> Result<NullCode> {
    for (n, c) in covers.iter().enumerate() {
        if !c.measure().le_pow2_neg(n as u32) {
            return Err(Error::CoverMeasure { n });
        }
    }
    let mut stems: Vec<BitString> = Vec::new();
    for c in covers {
        stems.extend(tilde_decomposition(std::slice::from_ref(c))?);
    }
    stems.sort();
    stems.dedup();

    // tail[k] = Σ_{j >= k} μ[t_j], exact.
    let mut tail = vec![Dyadic::zero(); stems.len() + 1];
    for k in (0..stems.len()).rev() {
        tail[k] = tail[k + 1].add(&Dyadic::pow2_neg(stems[k].len() as u32));
    }

    let mut f = Vec::new();
    let mut truncated = None;
    let mut h = 0usize;
    let mut n = 0u32;
    while h < stems.len() {
        let mut next = h + 1;
        while next < stems.len() && !tail[next].le_pow2_neg(n + 1) {
            next += 1;
        }
        let hi = next.min(stems.len() - 1);
        let block = ClopenSet::from_cylinders(stems[h..=hi].iter().cloned());
        match ClopenFamily::new(n).index_of(&block) {
            Ok(m) => f.push(m),
            Err(_) => {
                truncated = Some(Truncation::new(n as u64, "index-budget"));
                break;
            }
        }
        h = next;
        n += 1;
    }
    let mut code = NullCode::new(f);
    code.truncated = truncated;
    Ok(code)
}

/// Canonical stage set `∪_{m < n <= up_to} C^n_{f(n)}`, exact. Requires
/// `m < up_to < horizon`.
pub fn null_stage(code: &NullCode, m: u32, up_to: u32) -> Result<ClopenSet> {
    if m >= up_to || up_to >= code.horizon() {
        return Err(Error::HorizonExceeded {
            m,
            n: up_to,
            horizon: code.horizon(),
        });
    }
    let mut parts = Vec::new();
    for n in (m + 1)..=up_to {
        parts.push(code.level_set(n)?);
    }
    Ok(ClopenSet::union_all(parts.iter()))
}

/// Tri-state: does the point prefix lie in some level of `(m, up_to]`?
pub fn point_in_stage(code: &NullCode, x: &BitString, m: u32, up_to: u32) -> Option<bool> {
    if up_to >= code.horizon() {
        return None;
    }
    let mut decided = true;
    for n in (m + 1)..=up_to {
        match code.level_contains(n, x) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => decided = false,
        }
    }
    decided.then_some(false)
}

/// Descent record from [`avoid_null`]: the chosen prefix and the exact
/// relative-measure audit trail.
#[derive(Debug, Clone, Serialize)]
pub struct AvoidTrace {
    pub prefix: BitString,
    pub m0: u32,
    pub steps: Vec<RelativeStep>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelativeStep {
    pub prefix: BitString,
    pub stage_measure_within: Dyadic,
    pub cylinder_measure: Dyadic,
}

impl AvoidTrace {
    /// At every step the stage set fills strictly less than the cylinder.
    pub fn invariant_holds(&self) -> bool {
        self.steps
            .iter()
            .all(|s| s.stage_measure_within < s.cylinder_measure)
    }
}

/// Greedy cylinder descent to a prefix whose cylinder misses the stage set
/// `null_stage(code, m0, horizon-1)`, where `m0` is minimal with exact
/// stage measure below 1/2 (it exists because finite stages always measure
/// strictly below 1). Since the two children of a cylinder split its
/// trapped measure, a child with relative measure below 1 always exists
/// and the descent never blocks; at the stage set's depth the remaining
/// cylinder is disjoint from it.
pub fn avoid_null(code: &NullCode) -> Result<AvoidTrace> {
    let horizon = code.horizon();
    if horizon < 2 {
        return Ok(AvoidTrace {
            prefix: BitString::empty(),
            m0: 0,
            steps: Vec::new(),
        });
    }
    let top = horizon - 1;
    let mut chosen = 0;
    for m0 in 0..top {
        if null_stage(code, m0, top)?.measure() < Dyadic::pow2_neg(1) {
            chosen = m0;
            break;
        }
    }
    let stage = null_stage(code, chosen, top)?;
    let depth = stage.depth();
    let mut prefix = BitString::empty();
    let mut steps = Vec::new();
    for _ in 0..depth {
        let zero = prefix.child(0)?;
        let one = prefix.child(1)?;
        let mu_zero = stage.measure_within(&zero);
        let mu_one = stage.measure_within(&one);
        let (next, mu) = if mu_zero <= mu_one {
            (zero, mu_zero)
        } else {
            (one, mu_one)
        };
        steps.push(RelativeStep {
            prefix: next.clone(),
            stage_measure_within: mu.clone(),
            cylinder_measure: Dyadic::pow2_neg(next.len() as u32),
        });
        prefix = next;
    }
    Ok(AvoidTrace {
        prefix,
        m0: chosen,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(cyls: &[&str]) -> ClopenSet {
        ClopenSet::from_cylinders(cyls.iter().map(|s| s.parse().unwrap()))
    }

    #[test]
    fn all_empty_covers_give_empty_code() {
        let code = null_encode(&[ClopenSet::empty(), ClopenSet::empty()]).unwrap();
        assert!(code.truncated.is_none());
        for n in 0..code.horizon() {
            assert!(code.level_set(n).unwrap().is_empty());
        }
    }

    #[test]
    fn rejects_fat_cover() {
        let r = null_encode(&[ClopenSet::empty(), ClopenSet::empty(), set(&["0"])]);
        assert!(matches!(r, Err(Error::CoverMeasure { n: 2 })));
    }

    #[test]
    fn single_cover_one_step_recursion() {
        let code = null_encode(&[set(&["01"])]).unwrap();
        assert_eq!(code.level_set(0).unwrap(), set(&["01"]));
        assert_eq!(code.horizon(), 1);
    }

    #[test]
    fn all_zeros_cylinder_covers() {
        // G_n = [0^{n+1}]: the recursion keeps the all-zeros branch in
        // every stage and stage measures obey the 2^-m discipline.
        let covers: Vec<ClopenSet> = (0..8)
            .map(|n| ClopenSet::cylinder(BitString::from_bits(vec![0; n + 1]).unwrap()))
            .collect();
        let code = null_encode(&covers).unwrap();
        assert!(code.horizon() >= 6);
        let zeros = BitString::from_bits(vec![0; 16]).unwrap();
        let top = code.horizon() - 1;
        for m in 0..top {
            let stage = null_stage(&code, m, top).unwrap();
            assert!(stage.measure().le_pow2_neg(m));
            assert_eq!(stage.contains_point_prefix(&zeros), Some(true));
        }
    }

    #[test]
    fn stage_measure_discipline_and_horizon_errors() {
        let covers = vec![
            set(&["00", "10"]),
            set(&["010"]),
            set(&["0110", "1110"]),
            set(&["00000"]),
        ];
        let code = null_encode(&covers).unwrap();
        let top = code.horizon() - 1;
        for m in 0..top {
            assert!(null_stage(&code, m, top).unwrap().measure().le_pow2_neg(m));
        }
        assert!(null_stage(&code, 0, code.horizon()).is_err());
        assert!(null_stage(&code, 2, 2).is_err());
    }

    #[test]
    fn encoder_soundness_on_intersection_points() {
        let covers: Vec<ClopenSet> = (0..6)
            .map(|n| ClopenSet::cylinder(BitString::from_bits(vec![1; n + 1]).unwrap()))
            .collect();
        let code = null_encode(&covers).unwrap();
        let ones = BitString::from_bits(vec![1; 16]).unwrap();
        let top = code.horizon() - 1;
        for m in 0..top {
            assert_eq!(point_in_stage(&code, &ones, m, top), Some(true));
        }
    }

    #[test]
    fn avoid_null_examples() {
        let empty = NullCode::empty(6);
        let tr = avoid_null(&empty).unwrap();
        assert!(tr.invariant_holds());

        let covers: Vec<ClopenSet> = (0..6)
            .map(|n| ClopenSet::cylinder(BitString::from_bits(vec![0; n + 1]).unwrap()))
            .collect();
        let code = null_encode(&covers).unwrap();
        let tr = avoid_null(&code).unwrap();
        assert!(tr.invariant_holds());
        let stage = null_stage(&code, tr.m0, code.horizon() - 1).unwrap();
        assert!(stage
            .intersect(&ClopenSet::cylinder(tr.prefix.clone()))
            .is_empty());
        // The all-zeros branch is covered, so the avoider left it.
        assert!(tr.prefix.bits().iter().any(|&b| b == 1));
    }

    #[test]
    fn json_wire_form() {
        let code = NullCode::new(vec![BigUint::from(5u32), BigUint::from(0u32)]);
        let s = serde_json::to_string(&code).unwrap();
        assert_eq!(s, r#"{"kind":"null","f":[5,0]}"#);
        let back: NullCode = serde_json::from_str(&s).unwrap();
        assert_eq!(back, code);
    }
}
