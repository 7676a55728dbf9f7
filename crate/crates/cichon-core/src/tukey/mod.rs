//! Relational systems, their duals, and window-semantics evaluation.
//!
//! A relational system is a triple `(A_-, A_+, A)`; the evaluator decides
//! the windowed reading of `A` between coded carriers and returns a
//! three-valued verdict. Window conventions, fixed crate-wide:
//!
//! * "for all but finitely many n" reads as "for all n in `[n0, n_end)`";
//! * "for infinitely many n" reads as "for some n in the tail window"
//!   (stage tails scan `(n0, n_end]` to match stage-set indexing);
//! * `Unknown` records genuine undecidedness: an index beyond a carrier's
//!   horizon, a prefix too short, or a search budget that ran out.
//!
//! Verdict discipline: evaluators are deterministic; a decided verdict at
//! a window is never re-decided the other way by growing the window within
//! the carriers' horizons — existential witnesses persist, universal
//! counterexamples persist, and `Unknown` only ever resolves.

pub mod check;
pub mod diagram;
pub mod morphism;

use crate::bits::BitString;
use crate::codecs::good::{GoodFamily, IntersectingBudget, IntersectingFamily};
use crate::codecs::meager::{meager_avoider, meager_stage, point_in_dense_stage, MeagerCode};
use crate::codecs::null::{null_stage, point_in_stage, NullCode};
use crate::codecs::GoodFamilyKind;
use crate::ell1::Ell1Seq;
use crate::pideal::IdealElement;
use crate::slalom::Slalom;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use std::sync::OnceLock;

/// Finite evaluation window: index range plus Cantor-space resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub n0: u32,
    pub n_end: u32,
    pub depth: u32,
}

impl Window {
    pub fn new(n0: u32, n_end: u32, depth: u32) -> crate::error::Result<Self> {
        if n0 >= n_end || depth == 0 {
            return Err(crate::error::Error::Precondition(format!(
                "window needs n0 < n_end and depth >= 1, got [{n0}, {n_end}) depth {depth}"
            )));
        }
        Ok(Window { n0, n_end, depth })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})@{}", self.n0, self.n_end, self.depth)
    }
}

/// A concrete, independently checkable counterexample coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub at: String,
    pub detail: String,
}

impl Witness {
    pub fn new(at: impl Into<String>, detail: impl Into<String>) -> Self {
        Witness {
            at: at.into(),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails { witness: Witness },
    Unknown,
}

impl Verdict {
    pub fn fails(at: impl Into<String>, detail: impl Into<String>) -> Self {
        Verdict::Fails {
            witness: Witness::new(at, detail),
        }
    }

    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    /// Negation (for dual systems): swaps Holds and Fails.
    pub fn negate(&self, at: &str) -> Verdict {
        match self {
            Verdict::Holds => Verdict::fails(at, "dual of a holding instance"),
            Verdict::Fails { .. } => Verdict::Holds,
            Verdict::Unknown => Verdict::Unknown,
        }
    }
}

/// Universal window: all indices in `[n0, n_end)` must hold. `None` from
/// the predicate means undecidable at that index. Counterexamples decide
/// `Fails` immediately and permanently; `Holds` is only issued once the
/// window has exhausted the carrier's data (`n_end >= data_end`), so a
/// decided verdict never flips as the window grows. An empty effective
/// window is `Unknown`, never vacuously true.
pub fn forall_window_capped<F: Fn(u32) -> Option<bool>>(
    n0: u32,
    n_end: u32,
    data_end: u32,
    pred: F,
) -> Verdict {
    let hi = n_end.min(data_end);
    if hi <= n0 {
        return Verdict::Unknown;
    }
    let mut unknown = false;
    for n in n0..hi {
        match pred(n) {
            Some(true) => {}
            Some(false) => return Verdict::fails(format!("n={n}"), "index fails in window"),
            None => unknown = true,
        }
    }
    if unknown || n_end < data_end {
        Verdict::Unknown
    } else {
        Verdict::Holds
    }
}

/// Plain universal window over `[n0, n_end)` (used by morphism-aligned
/// checks, whose windows the construction already bounds).
pub fn forall_window<F: Fn(u32) -> Option<bool>>(n0: u32, n_end: u32, pred: F) -> Verdict {
    let mut unknown = false;
    for n in n0..n_end {
        match pred(n) {
            Some(true) => {}
            Some(false) => return Verdict::fails(format!("n={n}"), "index fails in window"),
            None => unknown = true,
        }
    }
    if unknown {
        Verdict::Unknown
    } else {
        Verdict::Holds
    }
}

/// Existential tail window over `(n0, min(n_end, data_end)]`: a witness
/// decides `Holds` permanently; `Fails` needs the window to exhaust the
/// carrier's tail with every index decided absent.
pub fn exists_tail_capped<F: Fn(u32) -> Option<bool>>(
    n0: u32,
    n_end: u32,
    data_end: u32,
    pred: F,
) -> Verdict {
    let hi = n_end.min(data_end);
    if hi <= n0 {
        return Verdict::Unknown;
    }
    let mut unknown = false;
    for n in (n0 + 1)..=hi {
        match pred(n) {
            Some(true) => return Verdict::Holds,
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown || n_end < data_end {
        Verdict::Unknown
    } else {
        Verdict::fails(
            format!("({n0}, {hi}]"),
            "no witness anywhere in the exhausted tail",
        )
    }
}

/// Existential index window over `[n0, min(n_end, data_end))`, same
/// discipline as [`exists_tail_capped`].
pub fn exists_window_capped<F: Fn(u32) -> Option<bool>>(
    n0: u32,
    n_end: u32,
    data_end: u32,
    pred: F,
) -> Verdict {
    let hi = n_end.min(data_end);
    if hi <= n0 {
        return Verdict::Unknown;
    }
    let mut unknown = false;
    for n in n0..hi {
        match pred(n) {
            Some(true) => return Verdict::Holds,
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown || n_end < data_end {
        Verdict::Unknown
    } else {
        Verdict::fails(
            format!("[{n0}, {hi})"),
            "no witness anywhere in the exhausted window",
        )
    }
}

/// Carrier kinds for the systems' two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierKind {
    BaireWord,
    CantorPoint,
    NullCode,
    MeagerCode,
    Slalom,
    Ell1Seq,
    IdealElement,
    CountFn,
    BaireMeager,
}

/// Baire-space meager sets, by typed descriptor: only the shapes the
/// morphisms need.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum BaireMeagerSet {
    /// `{z : z(n) <= f(n) for all but finitely many n}`.
    EventuallyBelow { bound: Vec<u64> },
}

/// A value inhabiting one of the carrier kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "carrier", rename_all = "snake_case")]
pub enum Carrier {
    Word { word: Vec<u64> },
    Point { prefix: BitString },
    Null(NullCode),
    Meager(MeagerCode),
    Slalom(Slalom),
    Ell1(Ell1Seq),
    Ideal(IdealElement),
    Count { profile: Vec<u64> },
    BaireMeager(BaireMeagerSet),
}

impl Carrier {
    pub fn kind(&self) -> CarrierKind {
        match self {
            Carrier::Word { .. } => CarrierKind::BaireWord,
            Carrier::Point { .. } => CarrierKind::CantorPoint,
            Carrier::Null(_) => CarrierKind::NullCode,
            Carrier::Meager(_) => CarrierKind::MeagerCode,
            Carrier::Slalom(_) => CarrierKind::Slalom,
            Carrier::Ell1(_) => CarrierKind::Ell1Seq,
            Carrier::Ideal(_) => CarrierKind::IdealElement,
            Carrier::Count { .. } => CarrierKind::CountFn,
            Carrier::BaireMeager(_) => CarrierKind::BaireMeager,
        }
    }

    pub fn as_word(&self) -> Option<&[u64]> {
        match self {
            Carrier::Word { word } => Some(word),
            _ => None,
        }
    }

    pub fn as_point(&self) -> Option<&BitString> {
        match self {
            Carrier::Point { prefix } => Some(prefix),
            _ => None,
        }
    }

    pub fn as_null(&self) -> Option<&NullCode> {
        match self {
            Carrier::Null(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_meager(&self) -> Option<&MeagerCode> {
        match self {
            Carrier::Meager(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_slalom(&self) -> Option<&Slalom> {
        match self {
            Carrier::Slalom(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_ell1(&self) -> Option<&Ell1Seq> {
        match self {
            Carrier::Ell1(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_ideal(&self) -> Option<&IdealElement> {
        match self {
            Carrier::Ideal(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_count(&self) -> Option<&[u64]> {
        match self {
            Carrier::Count { profile } => Some(profile),
            _ => None,
        }
    }

    pub fn as_baire_meager(&self) -> Option<&BaireMeagerSet> {
        match self {
            Carrier::BaireMeager(d) => Some(d),
            _ => None,
        }
    }
}

pub type Eval = Arc<dyn Fn(&Carrier, &Carrier, &Window) -> Verdict + Send + Sync>;

/// A relational system with an executable windowed evaluator.
#[derive(Clone)]
pub struct RelSystem {
    pub name: String,
    /// Which invariant this system computes, as metadata only.
    pub role: &'static str,
    pub minus: CarrierKind,
    pub plus: CarrierKind,
    pub eval: Eval,
}

impl fmt::Debug for RelSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RelSystem({}, {:?} ~ {:?})", self.name, self.minus, self.plus)
    }
}

impl RelSystem {
    pub fn eval(&self, a: &Carrier, b: &Carrier, w: &Window) -> Verdict {
        if a.kind() != self.minus || b.kind() != self.plus {
            return Verdict::Unknown;
        }
        (self.eval)(a, b, w)
    }

    /// The dual system: carriers swapped, relation negated-transposed.
    pub fn dual(&self) -> RelSystem {
        let inner = self.eval.clone();
        let name = format!("dual({})", self.name);
        let at = self.name.clone();
        RelSystem {
            name,
            role: self.role,
            minus: self.plus,
            plus: self.minus,
            eval: Arc::new(move |z, x, w| inner(x, z, w).negate(&at)),
        }
    }
}

/// Shared good-family instances captured by the standard evaluators.
#[derive(Clone)]
pub struct Families {
    pub intersecting: Arc<IntersectingFamily>,
}

impl Families {
    pub fn interval(&self) -> GoodFamily {
        GoodFamily::Intervals
    }

    pub fn of_kind(&self, kind: GoodFamilyKind) -> GoodFamily {
        match kind {
            GoodFamilyKind::Intervals => GoodFamily::Intervals,
            GoodFamilyKind::Intersecting => GoodFamily::Intersecting(self.intersecting.clone()),
        }
    }
}

/// Process-wide standard families (built once; immutable afterwards).
pub fn standard_families() -> &'static Families {
    static FAMS: OnceLock<Families> = OnceLock::new();
    FAMS.get_or_init(|| Families {
        intersecting: IntersectingFamily::build(IntersectingBudget::default()),
    })
}

/// Cap a stage scan to a code horizon: the largest usable `up_to`.
fn stage_top(w: &Window, horizon: u32) -> Option<u32> {
    if horizon < 2 {
        return None;
    }
    Some(w.n_end.min(horizon - 1))
}

const STAGE_BUDGET: u64 = 1 << 20;

/// `(R, N, ∈)`: a point prefix against a null code. "x lies in the coded
/// null set" reads as: some tail level of the window captures x.
pub fn sys_cov_null() -> RelSystem {
    RelSystem {
        name: "cov(N)".into(),
        role: "covering number of the null ideal",
        minus: CarrierKind::CantorPoint,
        plus: CarrierKind::NullCode,
        eval: Arc::new(|a, b, w| {
            let (x, f) = (a.as_point().unwrap(), b.as_null().unwrap());
            if f.horizon() < 2 {
                return Verdict::Unknown;
            }
            exists_tail_capped(w.n0, w.n_end, f.horizon() - 1, |n| f.level_contains(n, x))
        }),
    }
}

/// `(M, R, ∌)`: a meager code against a point. "y avoids the coded meager
/// set" reads as: every tail of the window has a level whose member
/// contains y.
pub fn sys_non_meager() -> RelSystem {
    RelSystem {
        name: "non(M)".into(),
        role: "uniformity of the meager ideal",
        minus: CarrierKind::MeagerCode,
        plus: CarrierKind::CantorPoint,
        eval: Arc::new(|a, b, w| {
            let (f, y) = (a.as_meager().unwrap(), b.as_point().unwrap());
            let fam = standard_families().of_kind(f.family);
            // Each tail check runs to the code's own horizon, so the
            // per-index verdicts do not depend on the window.
            let Some(top) = stage_top(&Window { n0: 0, n_end: u32::MAX, depth: w.depth }, f.horizon()) else {
                return Verdict::Unknown;
            };
            forall_window_capped(w.n0, w.n_end, top, |m| {
                point_in_dense_stage(f, &fam, y, m, top)
            })
        }),
    }
}

/// `(M, M, ⊆)`: stagewise inclusion of the coded meager sets. The coded
/// set of `f` sits inside that of `g` when `g`'s dense tails sit inside
/// `f`'s dense tails, stage by stage.
pub fn sys_cof_meager() -> RelSystem {
    RelSystem {
        name: "cof(M)".into(),
        role: "cofinality of the meager ideal",
        minus: CarrierKind::MeagerCode,
        plus: CarrierKind::MeagerCode,
        eval: Arc::new(|a, b, w| {
            let (f, g) = (a.as_meager().unwrap(), b.as_meager().unwrap());
            let fam_f = standard_families().of_kind(f.family);
            let fam_g = standard_families().of_kind(g.family);
            if f.horizon() < 2 || g.horizon() < 2 {
                return Verdict::Unknown;
            }
            // Stages anchor to the codes' shared horizon, not the window.
            let top = (f.horizon() - 1).min(g.horizon() - 1);
            forall_window_capped(w.n0, w.n_end, top, |m| {
                let sg = meager_stage(g, &fam_g, m, top, STAGE_BUDGET).ok()?;
                let sf = meager_stage(f, &fam_f, m, top, STAGE_BUDGET).ok()?;
                Some(sf.includes(&sg))
            })
        }),
    }
}

/// `(N, N, ⊆)`: stagewise inclusion of null codes. The left side stays in
/// expression form (pattern-coded levels never materialize); the right
/// side's stage materializes under a budget. Levels naming the same index
/// at the same position are included for free.
pub fn sys_cof_null() -> RelSystem {
    RelSystem {
        name: "cof(N)".into(),
        role: "cofinality of the null ideal",
        minus: CarrierKind::NullCode,
        plus: CarrierKind::NullCode,
        eval: Arc::new(|a, b, w| {
            let (f, g) = (a.as_null().unwrap(), b.as_null().unwrap());
            if f.horizon() < 2 || g.horizon() < 2 {
                return Verdict::Unknown;
            }
            let top = (f.horizon() - 1).min(g.horizon() - 1);
            forall_window_capped(w.n0, w.n_end, top, |m| {
                let mut lazy_complement: Option<crate::clopen::ClopenSet> = None;
                for n in (m + 1)..=top {
                    let idx = f.level_index(n)?;
                    // Identical index at the same level of g: free.
                    if g.level_index(n) == Some(idx) {
                        continue;
                    }
                    let Some(expr) = crate::index::ClopenFamily::new(n).expr(idx) else {
                        continue; // denotes the empty set
                    };
                    if lazy_complement.is_none() {
                        let sg = null_stage(g, m, top).ok()?;
                        lazy_complement = Some(sg.complement());
                    }
                    if expr.meets_clopen(lazy_complement.as_ref().unwrap()) {
                        return Some(false);
                    }
                }
                Some(true)
            })
        }),
    }
}

/// `(ω^ω, ω^ω, ⋡*)`: infinitely often strictly below.
pub fn sys_bounding() -> RelSystem {
    RelSystem {
        name: "b".into(),
        role: "bounding number",
        minus: CarrierKind::BaireWord,
        plus: CarrierKind::BaireWord,
        eval: Arc::new(|a, b, w| {
            let (f, g) = (a.as_word().unwrap(), b.as_word().unwrap());
            let data_end = f.len().min(g.len()) as u32;
            exists_window_capped(w.n0, w.n_end, data_end, |n| {
                Some(f[n as usize] < g[n as usize])
            })
        }),
    }
}

/// `(ω^ω, ω^ω, <=*)`: eventually dominated, read on the window.
pub fn sys_dominating() -> RelSystem {
    RelSystem {
        name: "d".into(),
        role: "dominating number",
        minus: CarrierKind::BaireWord,
        plus: CarrierKind::BaireWord,
        eval: Arc::new(|a, b, w| {
            let (f, g) = (a.as_word().unwrap(), b.as_word().unwrap());
            let data_end = f.len().min(g.len()) as u32;
            forall_window_capped(w.n0, w.n_end, data_end, |n| {
                Some(f[n as usize] <= g[n as usize])
            })
        }),
    }
}

/// `(N, N, ⊉)`: the coded set of `f` does not contain that of `g`,
/// witnessed by a cylinder of `g`'s deepest window stage escaping `f`'s.
pub fn sys_add_null() -> RelSystem {
    RelSystem {
        name: "add(N)".into(),
        role: "additivity of the null ideal",
        minus: CarrierKind::NullCode,
        plus: CarrierKind::NullCode,
        eval: Arc::new(|a, b, w| {
            let (f, g) = (a.as_null().unwrap(), b.as_null().unwrap());
            if f.horizon() < 2 || g.horizon() < 2 {
                return Verdict::Unknown;
            }
            let top = (f.horizon() - 1).min(g.horizon() - 1);
            if w.n0 + 1 >= top || w.n_end < top {
                return Verdict::Unknown;
            }
            // A witness: a cylinder inside g's deepest window tail whose
            // trace escapes f's coarsest window stage.
            let (Ok(deep_g), Ok(wide_f)) = (
                null_stage(g, top - 1, top),
                null_stage(f, w.n0, top),
            ) else {
                return Verdict::Unknown;
            };
            for t in deep_g.cylinders() {
                if !wide_f.contains_cylinder(t) {
                    return Verdict::Holds;
                }
            }
            // Refutation in the stage reading: g's stages inside f's.
            let refuted = forall_window(w.n0, top, |m| {
                let sg = null_stage(g, m, top).ok()?;
                let sf = null_stage(f, m, top).ok()?;
                Some(sf.includes(&sg))
            });
            match refuted {
                Verdict::Holds => Verdict::fails(
                    format!("[{}, {top})", w.n0),
                    "every stage of g is contained in the matching stage of f",
                ),
                _ => Verdict::Unknown,
            }
        }),
    }
}

/// `(M, M, ⊉)`: witnessed by a point in the coded meager set of `g` but
/// not in that of `f` (inside every dense tail of `f`, outside one of
/// `g`'s).
pub fn sys_add_meager() -> RelSystem {
    RelSystem {
        name: "add(M)".into(),
        role: "additivity of the meager ideal",
        minus: CarrierKind::MeagerCode,
        plus: CarrierKind::MeagerCode,
        eval: Arc::new(|a, b, w| {
            let (f, g) = (a.as_meager().unwrap(), b.as_meager().unwrap());
            if f.horizon() < 2 || g.horizon() < 2 {
                return Verdict::Unknown;
            }
            let top = (f.horizon() - 1).min(g.horizon() - 1);
            if w.n_end < top {
                return Verdict::Unknown;
            }
            let Ok(z) = meager_avoider(f, top, w.depth) else {
                return Verdict::Unknown;
            };
            let fam_f = standard_families().of_kind(f.family);
            let fam_g = standard_families().of_kind(g.family);
            // z inside every f-tail of the window...
            let in_f = forall_window(w.n0, top, |m| point_in_dense_stage(f, &fam_f, &z, m, top));
            // ... and missing some g-tail entirely.
            let out_g = (w.n0..top).any(|m| {
                point_in_dense_stage(g, &fam_g, &z, m, top) == Some(false)
            });
            match (in_f, out_g) {
                (Verdict::Holds, true) => Verdict::Holds,
                _ => Verdict::Unknown,
            }
        }),
    }
}

/// `(R, M, ∈)`: the point lies in the coded meager set: some window tail
/// of dense members misses it entirely.
pub fn sys_cov_meager() -> RelSystem {
    RelSystem {
        name: "cov(M)".into(),
        role: "covering number of the meager ideal",
        minus: CarrierKind::CantorPoint,
        plus: CarrierKind::MeagerCode,
        eval: Arc::new(|a, b, w| {
            let (x, g) = (a.as_point().unwrap(), b.as_meager().unwrap());
            let fam = standard_families().of_kind(g.family);
            if g.horizon() < 2 {
                return Verdict::Unknown;
            }
            let top = g.horizon() - 1;
            exists_window_capped(w.n0, w.n_end, top, |m| {
                point_in_dense_stage(g, &fam, x, m, top).map(|inside| !inside)
            })
        }),
    }
}

/// `(N, R, ∌)`: the point avoids the coded null set: some window tail
/// stage misses it.
pub fn sys_non_null() -> RelSystem {
    RelSystem {
        name: "non(N)".into(),
        role: "uniformity of the null ideal",
        minus: CarrierKind::NullCode,
        plus: CarrierKind::CantorPoint,
        eval: Arc::new(|a, b, w| {
            let (f, y) = (a.as_null().unwrap(), b.as_point().unwrap());
            if f.horizon() < 2 {
                return Verdict::Unknown;
            }
            let top = f.horizon() - 1;
            exists_window_capped(w.n0, w.n_end, top, |m| {
                point_in_stage(f, y, m, top).map(|inside| !inside)
            })
        }),
    }
}

/// `(C, C, ⊆*)`: levelwise trap inclusion on the window.
pub fn sys_slalom() -> RelSystem {
    RelSystem {
        name: "C".into(),
        role: "slalom localization (Tukey midpoint between M and N)",
        minus: CarrierKind::Slalom,
        plus: CarrierKind::Slalom,
        eval: Arc::new(|a, b, w| {
            let (s, t) = (a.as_slalom().unwrap(), b.as_slalom().unwrap());
            let data_end = s.horizon().min(t.horizon());
            forall_window_capped(w.n0, w.n_end, data_end, |n| {
                Some(s.trap(n)?.is_subset(t.trap(n)?))
            })
        }),
    }
}

/// `(l1, l1, <=*)`: pointwise domination on the window.
pub fn sys_ell1() -> RelSystem {
    RelSystem {
        name: "l1".into(),
        role: "summable sequences under eventual domination",
        minus: CarrierKind::Ell1Seq,
        plus: CarrierKind::Ell1Seq,
        eval: Arc::new(|a, b, w| {
            let (f, g) = (a.as_ell1().unwrap(), b.as_ell1().unwrap());
            let data_end = f.horizon().min(g.horizon());
            forall_window_capped(w.n0, w.n_end, data_end, |n| {
                Some(f.value(n)? <= g.value(n)?)
            })
        }),
    }
}

/// `(J, J, ⊉*)`: the summable ideal under "does not almost contain",
/// witnessed by an explicit element of `Y \ X` below the resolution.
pub fn sys_ideal() -> RelSystem {
    RelSystem {
        name: "J".into(),
        role: "summable ideal under almost-containment",
        minus: CarrierKind::IdealElement,
        plus: CarrierKind::IdealElement,
        eval: Arc::new(|a, b, w| {
            let (x, y) = (a.as_ideal().unwrap(), b.as_ideal().unwrap());
            let up = (w.n_end as u64).min(x.resolution()).min(y.resolution());
            for &i in y.support.iter() {
                if i < up && !x.support.contains(&i) {
                    return Verdict::Holds;
                }
            }
            // Tails beyond the certificates could still separate them.
            Verdict::Unknown
        }),
    }
}

/// `(X, X, ⋡*)` on counting profiles.
pub fn sys_counting() -> RelSystem {
    RelSystem {
        name: "Xbar".into(),
        role: "counting profiles under eventual domination",
        minus: CarrierKind::CountFn,
        plus: CarrierKind::CountFn,
        eval: Arc::new(|a, b, w| {
            let (x, y) = (a.as_count().unwrap(), b.as_count().unwrap());
            let data_end = x.len().min(y.len()) as u32;
            exists_window_capped(w.n0, w.n_end, data_end, |n| {
                Some(x[n as usize] < y[n as usize])
            })
        }),
    }
}

/// `(M_Baire, ω^ω, ∌)`: a typed Baire-space meager descriptor against a
/// word.
pub fn sys_baire_meager() -> RelSystem {
    RelSystem {
        name: "non(M_Baire)".into(),
        role: "meager sets of Baire space, by descriptor",
        minus: CarrierKind::BaireMeager,
        plus: CarrierKind::BaireWord,
        eval: Arc::new(|a, b, w| {
            let (d, y) = (a.as_baire_meager().unwrap(), b.as_word().unwrap());
            match d {
                BaireMeagerSet::EventuallyBelow { bound } => {
                    // y escapes: infinitely often above the bound.
                    let data_end = y.len().min(bound.len()) as u32;
                    exists_window_capped(w.n0, w.n_end, data_end, |n| {
                        Some(y[n as usize] > bound[n as usize])
                    })
                }
            }
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(v: &[u64]) -> Carrier {
        Carrier::Word { word: v.to_vec() }
    }

    #[test]
    fn window_validation() {
        assert!(Window::new(4, 24, 24).is_ok());
        assert!(Window::new(4, 4, 24).is_err());
        assert!(Window::new(0, 4, 0).is_err());
    }

    #[test]
    fn dominating_and_bounding_verdicts() {
        let w = Window::new(0, 4, 8).unwrap();
        let d = sys_dominating();
        assert!(d.eval(&word(&[1, 1, 1, 1]), &word(&[2, 2, 2, 2]), &w).is_holds());
        assert!(d.eval(&word(&[1, 9, 1, 1]), &word(&[2, 2, 2, 2]), &w).is_fails());
        // Shorter data, window past it: decided (nothing can grow).
        assert!(d.eval(&word(&[1, 1]), &word(&[2, 2, 2, 2]), &w).is_holds());
        // Window shorter than the data: all-true stays undecided.
        let short = Window::new(0, 3, 8).unwrap();
        assert_eq!(
            d.eval(&word(&[1, 1, 1, 1]), &word(&[2, 2, 2, 2]), &short),
            Verdict::Unknown
        );
        let b = sys_bounding();
        assert!(b.eval(&word(&[5, 5, 5, 1]), &word(&[2, 2, 2, 2]), &w).is_holds());
        assert!(b.eval(&word(&[5, 5, 5, 5]), &word(&[2, 2, 2, 2]), &w).is_fails());
        assert_eq!(
            b.eval(&word(&[5, 5, 5, 5]), &word(&[2, 2, 2, 2]), &short),
            Verdict::Unknown
        );
    }

    #[test]
    fn dual_is_involution_on_verdicts() {
        let w = Window::new(0, 4, 8).unwrap();
        let d = sys_dominating();
        let dd = d.dual().dual();
        for (f, g) in [
            (word(&[1, 1, 1, 1]), word(&[2, 2, 2, 2])),
            (word(&[3, 1, 1, 1]), word(&[2, 2, 2, 2])),
            (word(&[1, 1]), word(&[2, 2])),
        ] {
            let v1 = d.eval(&f, &g, &w);
            let v2 = dd.eval(&f, &g, &w);
            // Equal up to the witness text.
            assert_eq!(v1.is_holds(), v2.is_holds());
            assert_eq!(v1.is_fails(), v2.is_fails());
        }
        // dual of (<=*) relates like (not >=*) with sides swapped.
        let dual = d.dual();
        let v = dual.eval(&word(&[2, 2, 2, 2]), &word(&[1, 9, 1, 1]), &w);
        assert!(v.is_holds()); // since not (1,9,1,1) <=* (2,2,2,2)
    }

    #[test]
    fn verdict_monotone_in_window_growth() {
        // Existential witnesses persist; universal counterexamples persist.
        let b = sys_bounding();
        let d = sys_dominating();
        let f = word(&[5, 5, 1, 5, 5, 5, 5, 5]);
        let g = word(&[2, 2, 2, 2, 2, 2, 2, 2]);
        let mut saw_b_holds = false;
        let mut saw_d_fails = false;
        for n_end in 1..=8 {
            let w = Window::new(0, n_end, 8).unwrap();
            let vb = b.eval(&f, &g, &w);
            let vd = d.eval(&f, &g, &w);
            if saw_b_holds {
                assert!(vb.is_holds(), "existential witness lost at {n_end}");
            }
            if vb.is_holds() {
                saw_b_holds = true;
            }
            if saw_d_fails {
                assert!(vd.is_fails(), "universal counterexample lost at {n_end}");
            }
            if vd.is_fails() {
                saw_d_fails = true;
            }
        }
        assert!(saw_b_holds && saw_d_fails);
    }
}
