//! Error and truncation types shared across the crate.
//!
//! Truncation is not an error: search budgets are part of the artifact's
//! semantics, and an exhausted budget produces an explicit marker that
//! downstream consumers (windowed relation evaluators, contract checks)
//! turn into `Unknown` verdicts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A marker recording that a budgeted search or encoding stopped early.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Index (stage, level, coordinate) at which the budget ran out.
    pub at: u64,
    /// Short machine-readable reason, e.g. `"search-budget"`.
    pub reason: String,
}

impl Truncation {
    pub fn new(at: u64, reason: impl Into<String>) -> Self {
        Truncation {
            at,
            reason: reason.into(),
        }
    }
}

impl std::fmt::Display for Truncation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "truncated at {} ({})", self.at, self.reason)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("bit string too long: {0} bits (cap {1})")]
    DepthCap(usize, usize),
    #[error("dyadic subtraction would go negative")]
    NegativeDyadic,
    #[error("translation word shorter than set depth: |x| = {word} < {depth}")]
    TranslationDepth { word: usize, depth: u32 },
    #[error("stage list is not increasing at position {0}")]
    StagesNotIncreasing(usize),
    #[error("materialization budget exceeded: {cylinders} cylinders (cap {cap})")]
    MaterializeBudget { cylinders: u64, cap: u64 },
    #[error("measure of set exceeds 2^-{level}")]
    MeasureExceedsLevel { level: u32 },
    #[error("cover {n} has measure above 2^-{n}")]
    CoverMeasure { n: usize },
    #[error("window [{m}, {n}) outside code horizon {horizon}")]
    HorizonExceeded { m: u32, n: u32, horizon: u32 },
    #[error("tree at index {0} is not nowhere dense at its depth")]
    NotNowhereDense(usize),
    #[error("invalid tree approximation: {0}")]
    InvalidTree(String),
    #[error("invalid chain: element {position} is not in the admissible set of its predecessor")]
    InvalidChain { position: usize },
    #[error("family index {0} out of enumerated range (budget)")]
    FamilyIndexRange(u64),
    #[error("carrier kind mismatch: expected {expected}, got {got}")]
    CarrierMismatch {
        expected: &'static str,
        got: &'static str,
    },
    #[error("morphism composition mismatch: {left} -> {right}")]
    ComposeMismatch { left: String, right: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("exhaustive search bound exceeded: {0}")]
    SearchBound(String),
    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
