//! Seeded contract checking for morphisms.
//!
//! A trial samples a pair `(a, b)`, evaluates the hypothesis
//! `B(φ_-(a), b)` and, when it holds, the conclusion `A(a, φ_+(b))`.
//! Truncations and undecided windows count as unknown, never as
//! violations. Trials are independent (one deterministic RNG stream per
//! trial index), so the run parallelizes without changing any byte of the
//! report.

use super::morphism::Morphism;
use super::{Verdict, Window, Witness};
use crate::par;
use crate::sampler::Sampler;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub confirmed: u64,
    pub vacuous: u64,
    pub violated: u64,
    pub unknown: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub trial: u64,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractReport {
    pub morphism: String,
    pub seed: u64,
    pub window: Window,
    pub trials: u64,
    pub counts: Counts,
    /// Trials whose φ-maps truncated (subset of `unknown`).
    pub truncations: u64,
    /// Unknown rate as a fixed-point decimal string (exact, 6 places).
    pub unknown_rate: String,
    /// At most the first 10 violations, by trial index.
    pub violations: Vec<ViolationRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Confirmed,
    Vacuous,
    Violated,
    Unknown { truncated: bool },
}

/// Run one trial; deterministic in `(seed, trial)`.
fn run_trial(m: &Morphism, sampler: &Sampler, w: &Window, seed: u64, trial: u64) -> (Outcome, Option<Witness>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let (a, b) = sampler.pair(&mut rng, w);
    let fa = match m.minus(&a, w) {
        Ok(fa) => fa,
        Err(_) => return (Outcome::Unknown { truncated: true }, None),
    };
    match m.target.eval(&fa, &b, w) {
        Verdict::Holds => {}
        Verdict::Fails { .. } => return (Outcome::Vacuous, None),
        Verdict::Unknown => return (Outcome::Unknown { truncated: false }, None),
    }
    let gb = match m.plus(&b, w) {
        Ok(gb) => gb,
        Err(_) => return (Outcome::Unknown { truncated: true }, None),
    };
    match m.check_a(&a, &b, &gb, w) {
        Verdict::Holds => (Outcome::Confirmed, None),
        Verdict::Fails { witness } => (Outcome::Violated, Some(witness)),
        Verdict::Unknown => (Outcome::Unknown { truncated: false }, None),
    }
}

/// Check a morphism's contract over seeded samples.
pub fn check_contract(
    m: &Morphism,
    sampler: &Sampler,
    w: &Window,
    trials: u64,
    seed: u64,
) -> ContractReport {
    let outcomes = par::map_indexed(trials as usize, |i| {
        run_trial(m, sampler, w, seed, i as u64)
    });
    aggregate(m, w, trials, seed, outcomes)
}

/// Sequential variant, for benchmarking the parallel speedup.
pub fn check_contract_seq(
    m: &Morphism,
    sampler: &Sampler,
    w: &Window,
    trials: u64,
    seed: u64,
) -> ContractReport {
    let outcomes = par::map_indexed_seq(trials as usize, |i| {
        run_trial(m, sampler, w, seed, i as u64)
    });
    aggregate(m, w, trials, seed, outcomes)
}

fn aggregate(
    m: &Morphism,
    w: &Window,
    trials: u64,
    seed: u64,
    outcomes: Vec<(Outcome, Option<Witness>)>,
) -> ContractReport {
    let mut counts = Counts::default();
    let mut truncations = 0;
    let mut violations = Vec::new();
    for (i, (o, wit)) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Confirmed => counts.confirmed += 1,
            Outcome::Vacuous => counts.vacuous += 1,
            Outcome::Violated => {
                counts.violated += 1;
                if violations.len() < 10 {
                    violations.push(ViolationRecord {
                        trial: i as u64,
                        witness: wit.unwrap_or_else(|| Witness::new("?", "missing witness")),
                    });
                }
            }
            Outcome::Unknown { truncated } => {
                counts.unknown += 1;
                if truncated {
                    truncations += 1;
                }
            }
        }
    }
    let unknown_rate = if trials == 0 {
        "0.000000".to_string()
    } else {
        let scaled = counts.unknown * 1_000_000 / trials;
        format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
    };
    ContractReport {
        morphism: m.name.clone(),
        seed,
        window: *w,
        trials,
        counts,
        truncations,
        unknown_rate,
        violations,
    }
}
