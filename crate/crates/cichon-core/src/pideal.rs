//! The summable ideal with certified tails, its generator sequence, and
//! the slalom transformer between them.
//!
//! Members of the summable ideal `{X ⊆ ω : Σ_{i∈X} 1/i < ∞}` are carried
//! as an explicit finite support plus a certificate bounding every tail
//! weight. The generator sequence `G_n = {X : weight(X) <= ε_n}` with
//! `ε_0 = 1`, `ε_{n+1} = ε_n / 2^{n+1}` is closed under `2^{n+1}`-fold
//! unions one level down, which is exactly what the transformer's noise
//! filtering needs.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result, Truncation};
use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

type Rat = Ratio<BigUint>;

fn rat(n: u64, d: u64) -> Rat {
    Ratio::new(BigUint::from(n), BigUint::from(d))
}

fn dyadic_to_rat(d: &Dyadic) -> Rat {
    Ratio::new(d.numerator().clone(), BigUint::one() << d.exponent() as usize)
}

/// Exact weight `Σ_{i∈set} 1/i` of a finite set (elements >= 1).
pub fn weight(set: &BTreeSet<u64>) -> Rat {
    let mut acc = Rat::zero();
    for &i in set {
        acc += rat(1, i);
    }
    acc
}

/// Tail certificate: a nonincreasing bound on `Σ_{i∈X, i>=k} 1/i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailCert {
    /// The support is all of `X`; tails beyond it are empty.
    Zero,
    /// `bound(k) = first * ratio^{floor(log2(k / from))}` for `k >= from`:
    /// geometric decay along doublings, the natural shape for summable
    /// tails (e.g. `X = {2^j}` has tail(k) ~ 2/k).
    Geometric {
        from: u64,
        first: Dyadic,
        ratio: Dyadic,
    },
}

impl TailCert {
    fn geometric_bound(from: u64, first: &Dyadic, ratio: &Dyadic, k: u64) -> Rat {
        let mut acc = dyadic_to_rat(first);
        if k <= from {
            return acc;
        }
        let r = dyadic_to_rat(ratio);
        let mut reach = from;
        while reach.saturating_mul(2) <= k {
            reach *= 2;
            acc *= r.clone();
        }
        acc
    }
}

/// A summable-ideal member: explicit support plus tail certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealElement {
    pub support: BTreeSet<u64>,
    pub cert: TailCert,
}

impl IdealElement {
    pub fn new(support: BTreeSet<u64>, cert: TailCert) -> Result<Self> {
        if support.contains(&0) {
            return Err(Error::Precondition("support elements start at 1".into()));
        }
        if let TailCert::Geometric { from, first, ratio } = &cert {
            if *from == 0 || !(dyadic_to_rat(ratio) < Rat::one()) {
                return Err(Error::Precondition(
                    "geometric certificate needs from >= 1 and ratio < 1".into(),
                ));
            }
            // The certificate must dominate the explicit support's tails at
            // every point where we may evaluate it.
            let mut points: Vec<u64> = support.iter().copied().filter(|&i| i >= *from).collect();
            points.push(*from);
            for k in points {
                let tail: Rat = support
                    .iter()
                    .filter(|&&i| i >= k)
                    .fold(Rat::zero(), |acc, &i| acc + rat(1, i));
                if tail > TailCert::geometric_bound(*from, first, ratio, k) {
                    return Err(Error::Precondition(format!(
                        "certificate below explicit tail at k = {k}"
                    )));
                }
            }
        }
        Ok(IdealElement { support, cert })
    }

    pub fn explicit(support: impl IntoIterator<Item = u64>) -> Result<Self> {
        IdealElement::new(support.into_iter().collect(), TailCert::Zero)
    }

    /// Sound upper bound on `Σ_{i∈X, i>=k} 1/i`.
    pub fn tail_bound(&self, k: u64) -> Rat {
        match &self.cert {
            TailCert::Zero => self
                .support
                .iter()
                .filter(|&&i| i >= k)
                .fold(Rat::zero(), |acc, &i| acc + rat(1, i)),
            TailCert::Geometric { from, first, ratio } => {
                if k >= *from {
                    TailCert::geometric_bound(*from, first, ratio, k)
                } else {
                    let explicit: Rat = self
                        .support
                        .iter()
                        .filter(|&&i| i >= k && i < *from)
                        .fold(Rat::zero(), |acc, &i| acc + rat(1, i));
                    explicit + TailCert::geometric_bound(*from, first, ratio, *from)
                }
            }
        }
    }

    /// Sound upper bound on the total weight.
    pub fn weight_bound(&self) -> Rat {
        let below: Rat = match &self.cert {
            TailCert::Zero => weight(&self.support),
            TailCert::Geometric { from, .. } => self
                .support
                .iter()
                .filter(|&&i| i < *from)
                .fold(Rat::zero(), |acc, &i| acc + rat(1, i)),
        };
        match &self.cert {
            TailCert::Zero => below,
            TailCert::Geometric { from, first, ratio } => {
                below + TailCert::geometric_bound(*from, first, ratio, *from)
            }
        }
    }

    /// Largest `n` for which `|X ∩ n|` is exact from the explicit support.
    pub fn resolution(&self) -> u64 {
        match &self.cert {
            TailCert::Zero => u64::MAX,
            TailCert::Geometric { from, .. } => *from,
        }
    }
}

/// `ε_n = 2^{-n(n+1)/2}`: the weakest schedule with
/// `2^{n+1} · ε_{n+1} <= ε_n` and `ε_0 = 1`.
pub fn epsilon(n: u32) -> Dyadic {
    Dyadic::pow2_neg(n * (n + 1) / 2)
}

/// Is the set inside the generator `G_n = {X : weight(X) <= ε_n}`?
pub fn in_generator(set: &BTreeSet<u64>, n: u32) -> bool {
    weight(set) <= dyadic_to_rat(&epsilon(n))
}

/// Minimal certified cut `k_n(X)` with `tail_bound(k) <= ε_{n+2}`, scanned
/// over the certificate's breakpoints. Errors with a truncation when the
/// certificate is too weak to reach the target.
pub fn k_n(x: &IdealElement, n: u32) -> std::result::Result<u64, Truncation> {
    let target = dyadic_to_rat(&epsilon(n + 2));
    let mut points: Vec<u64> = vec![0];
    points.extend(x.support.iter().map(|&i| i + 1));
    if let TailCert::Geometric { from, .. } = &x.cert {
        let mut k = *from;
        for _ in 0..2048 {
            points.push(k);
            match k.checked_mul(2) {
                Some(next) => k = next,
                None => break,
            }
        }
    }
    points.sort_unstable();
    points.dedup();
    for k in points {
        if x.tail_bound(k) <= target {
            return Ok(k);
        }
    }
    Err(Truncation::new(n as u64, "certificate-resolution"))
}

/// `φ_-(X)(n) = X ∩ k_n(X)`: the nested sequence of certified prefixes.
pub fn phi_minus_stevo1(x: &IdealElement, levels: u32) -> std::result::Result<Vec<BTreeSet<u64>>, Truncation> {
    let mut out = Vec::new();
    for n in 0..levels {
        let k = k_n(x, n)?;
        out.push(x.support.iter().copied().filter(|&i| i < k).collect());
    }
    Ok(out)
}

/// A slalom over `[ω]^{<ω}`: each trap is a finite set of finite sets,
/// with the discipline `|S(n)| <= 2^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSlalom {
    pub traps: Vec<Vec<BTreeSet<u64>>>,
}

impl SetSlalom {
    pub fn new(traps: Vec<Vec<BTreeSet<u64>>>) -> Result<Self> {
        for (n, t) in traps.iter().enumerate() {
            if n < 63 && t.len() > 1usize << n {
                return Err(Error::Precondition(format!(
                    "trap {n} has {} entries, above 2^{n}",
                    t.len()
                )));
            }
        }
        Ok(SetSlalom { traps })
    }

    pub fn horizon(&self) -> u32 {
        self.traps.len() as u32
    }
}

/// Elements of `t` above `max(s)`; all of `t` when `s` is empty.
pub fn above_max(t: &BTreeSet<u64>, s: &BTreeSet<u64>) -> BTreeSet<u64> {
    match s.iter().next_back() {
        None => t.clone(),
        Some(&m) => t.iter().copied().filter(|&i| i > m).collect(),
    }
}

/// The filtered increments `v_n = ∪{t \ max(s) : (t,s) ∈ Z_n}` where
/// `Z_n = {(t,s) ∈ S(n+1) × S(n) : s ⊆ t, t \ max(s) ∈ G_{n+2}}`.
pub fn increments(s: &SetSlalom) -> Vec<BTreeSet<u64>> {
    let mut out = Vec::new();
    if s.traps.is_empty() {
        return out;
    }
    for n in 0..s.traps.len() - 1 {
        let mut v = BTreeSet::new();
        for t in &s.traps[n + 1] {
            for lo in &s.traps[n] {
                if lo.is_subset(t) {
                    let step = above_max(t, lo);
                    if in_generator(&step, n as u32 + 2) {
                        v.extend(step);
                    }
                }
            }
        }
        out.push(v);
    }
    out
}

/// `φ_+(S) = ∪_n v_n`, with its exact (explicit) certificate. Each `v_n`
/// is a union of at most `2^{n+1}` sets from `G_{n+2}`, hence lands in
/// `G_{n+1}`; cumulatively `v_n ∪ ... ∪ v_{n+l} ∈ G_n`.
pub fn phi_plus_stevo1(s: &SetSlalom) -> Result<(IdealElement, Vec<BTreeSet<u64>>)> {
    let vs = increments(s);
    let mut support = BTreeSet::new();
    for v in &vs {
        support.extend(v.iter().copied());
    }
    Ok((IdealElement::explicit(support)?, vs))
}

/// The counting profile `X̄(n) = |X ∩ n|`, exact up to the element
/// resolution of the certificate.
pub fn count_fn(x: &IdealElement, n: u64) -> Result<u64> {
    if n > x.resolution() {
        return Err(Error::Precondition(format!(
            "count at {n} beyond explicit resolution {}",
            x.resolution()
        )));
    }
    Ok(x.support.iter().filter(|&&i| i < n).count() as u64)
}

/// Counting profiles as words, for the counting-function morphism.
pub fn count_profile(x: &IdealElement, levels: u32) -> Result<Vec<u64>> {
    (0..levels as u64).map(|n| count_fn(x, n)).collect()
}

/// Recover a set from a counting profile (steps of size at most one).
pub fn set_from_profile(profile: &[u64]) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    for i in 1..profile.len() {
        match profile[i].checked_sub(profile[i - 1]) {
            Some(0) => {}
            Some(1) => {
                out.insert(i as u64 - 1);
            }
            _ => {
                return Err(Error::Parse(format!(
                    "profile step at {i} is not 0 or 1"
                )))
            }
        }
    }
    if out.contains(&0) {
        return Err(Error::Parse("profile puts 0 in the support".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(elems: &[u64]) -> IdealElement {
        IdealElement::explicit(elems.iter().copied()).unwrap()
    }

    #[test]
    fn epsilon_schedule_subadditive() {
        // 2^{n+1} * ε_{n+1} <= ε_n, exactly.
        for n in 0..10u32 {
            let lhs = epsilon(n + 1).shl(n + 1);
            assert!(lhs <= epsilon(n));
        }
    }

    #[test]
    fn generator_union_discipline() {
        // 2^{n+1} arbitrary members of G_{n+1} union into G_n.
        for n in 0..4u32 {
            let copies = 1usize << (n + 1);
            // Worst case allowed by the weight bound: distinct singletons
            // whose weights sit just under ε_{n+1}.
            let mut union = BTreeSet::new();
            let mut sets = Vec::new();
            for j in 0..copies {
                let e = epsilon(n + 1);
                // smallest element with 1/i <= ε_{n+1}: i = 2^{exp}
                let base = 1u64 << e.exponent().min(40);
                let elem = base + j as u64;
                let mut s = BTreeSet::new();
                s.insert(elem);
                assert!(in_generator(&s, n + 1));
                union.insert(elem);
                sets.push(s);
            }
            assert!(
                in_generator(&union, n),
                "union of 2^{} G_{}-members left G_{n}",
                n + 1,
                n + 1
            );
        }
    }

    #[test]
    fn k_n_examples() {
        // Empty set: every k works, so k_n = 0.
        let empty = ideal(&[]);
        for n in 0..6 {
            assert_eq!(k_n(&empty, n).unwrap(), 0);
        }
        // Powers of two with a geometric certificate: k_n in closed form
        // from the doubling breakpoints, verified by direct tail summation.
        let support: BTreeSet<u64> = (0..24).map(|j| 1u64 << j).collect();
        let x = IdealElement::new(
            support.clone(),
            TailCert::Geometric {
                from: 1,
                first: Dyadic::from_u64(2),
                ratio: Dyadic::pow2_neg(1),
            },
        )
        .unwrap();
        for n in 0..4u32 {
            let k = k_n(&x, n).unwrap();
            let tail: Rat = support
                .iter()
                .filter(|&&i| i >= k)
                .fold(Rat::zero(), |acc, &i| acc + rat(1, i));
            assert!(tail <= dyadic_to_rat(&epsilon(n + 2)));
            if k > 1 {
                // Minimality at doubling resolution: half the cut fails.
                assert!(x.tail_bound(k / 2) > dyadic_to_rat(&epsilon(n + 2)));
            }
        }
        // k_n is nondecreasing in n.
        let ks: Vec<u64> = (0..6).map(|n| k_n(&x, n).unwrap()).collect();
        assert!(ks.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn phi_minus_nested() {
        let x = ideal(&[4, 8, 64, 1024]);
        let seq = phi_minus_stevo1(&x, 5).unwrap();
        for w in seq.windows(2) {
            assert!(w[0].is_subset(&w[1]));
        }
        // On explicit-support elements the terms are X ∩ k_n exactly.
        for (n, term) in seq.iter().enumerate() {
            let k = k_n(&x, n as u32).unwrap();
            let expect: BTreeSet<u64> =
                x.support.iter().copied().filter(|&i| i < k).collect();
            assert_eq!(term, &expect);
        }
    }

    #[test]
    fn capture_and_noise_filtering() {
        let x = ideal(&[8, 64, 4096, 65536]);
        let levels = 5;
        let honest = phi_minus_stevo1(&x, levels).unwrap();
        let slalom = SetSlalom::new(honest.iter().map(|t| vec![t.clone()]).collect()).unwrap();
        let (y, vs) = phi_plus_stevo1(&slalom).unwrap();
        // Capture: X \ k_0 ⊆ Y.
        let k0 = k_n(&x, 0).unwrap();
        for &i in x.support.iter().filter(|&&i| i >= k0) {
            assert!(y.support.contains(&i), "captured element {i} missing");
        }
        // Injected pairs whose increments blow the generator bound are
        // filtered out, leaving every v_n unchanged. The fat entries are
        // mutually non-nested, so they only ever pair with honest entries.
        let mut noisy_traps: Vec<Vec<BTreeSet<u64>>> =
            honest.iter().map(|t| vec![t.clone()]).collect();
        let mut fat1 = honest[1].clone();
        fat1.extend(100..300u64); // weight ~ ln 3 above max(φ_-(0)), far over ε_2
        noisy_traps[1].push(fat1);
        let mut fat2 = honest[2].clone();
        fat2.extend(310..600u64);
        noisy_traps[2].push(fat2);
        let noisy = SetSlalom::new(noisy_traps).unwrap();
        let vs_noisy = increments(&noisy);
        assert_eq!(vs, vs_noisy, "noise pairs changed the increments");
        // Cumulative unions stay in the right generators.
        for n in 0..vs.len() {
            for l in 0..vs.len() - n {
                let mut cum = BTreeSet::new();
                for v in &vs[n..=n + l] {
                    cum.extend(v.iter().copied());
                }
                assert!(in_generator(&cum, n as u32), "v_{n}..v_{} left G_{n}", n + l);
            }
        }
    }

    #[test]
    fn counting_profiles() {
        let x = ideal(&[2, 4, 6, 8]);
        assert_eq!(count_fn(&x, 10).unwrap(), 4);
        assert_eq!(count_fn(&ideal(&[]), 7).unwrap(), 0);
        let profile = count_profile(&x, 10).unwrap();
        assert_eq!(set_from_profile(&profile).unwrap(), x.support);
    }
}
