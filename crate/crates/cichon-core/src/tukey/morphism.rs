//! Executable morphisms between relational systems: a pair of maps
//! transporting the relation backwards, plus an optional window-aligned
//! checker for the source relation.
//!
//! The contract of a morphism `(φ_-, φ_+) : A -> B` is
//! `A(a, φ_+(b))` whenever `B(φ_-(a), b)`. Several constructions shift or
//! stretch the index window between the two sides (pairing coordinates
//! doubles levels, pattern blocks start at triangular offsets), so each
//! morphism may install its own `a_check` that evaluates the *source*
//! relation with the alignment its construction guarantees; the default is
//! the source system's plain evaluator.

use super::{Carrier, RelSystem, Verdict, Window};
use crate::error::{Error, Result, Truncation};
use std::sync::Arc;

pub type CarrierMap =
    Arc<dyn Fn(&Carrier, &Window) -> std::result::Result<Carrier, Truncation> + Send + Sync>;
pub type AlignedCheck =
    Arc<dyn Fn(&Carrier, &Carrier, &Carrier, &Window) -> Verdict + Send + Sync>;

#[derive(Clone)]
pub struct Morphism {
    pub name: String,
    pub source: RelSystem,
    pub target: RelSystem,
    pub phi_minus: CarrierMap,
    pub phi_plus: CarrierMap,
    /// Window-aligned evaluation of the source relation, when the plain
    /// evaluator's window would misalign with the construction.
    pub a_check: Option<AlignedCheck>,
}

impl std::fmt::Debug for Morphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} -> {}", self.name, self.source.name, self.target.name)
    }
}

impl Morphism {
    /// Apply `φ_-` to a source-minus carrier.
    pub fn minus(&self, a: &Carrier, w: &Window) -> std::result::Result<Carrier, Truncation> {
        (self.phi_minus)(a, w)
    }

    /// Apply `φ_+` to a target-plus carrier.
    pub fn plus(&self, b: &Carrier, w: &Window) -> std::result::Result<Carrier, Truncation> {
        (self.phi_plus)(b, w)
    }

    /// Evaluate the source relation `A(a, aplus)`, window-aligned. The
    /// hypothesis carrier `b` is available for alignment (a construction
    /// may only promise inclusion past a lag that depends on it).
    pub fn check_a(&self, a: &Carrier, b: &Carrier, aplus: &Carrier, w: &Window) -> Verdict {
        match &self.a_check {
            Some(f) => f(a, b, aplus, w),
            None => self.source.eval(a, aplus, w),
        }
    }

    /// The identity morphism on a system.
    pub fn identity(sys: RelSystem) -> Morphism {
        Morphism {
            name: format!("id({})", sys.name),
            source: sys.clone(),
            target: sys,
            phi_minus: Arc::new(|a, _| Ok(a.clone())),
            phi_plus: Arc::new(|b, _| Ok(b.clone())),
            a_check: None,
        }
    }

    /// The dual morphism: between the dual systems, with the component
    /// maps swapped.
    pub fn dual(&self) -> Morphism {
        Morphism {
            name: format!("dual({})", self.name),
            source: self.target.dual(),
            target: self.source.dual(),
            phi_minus: self.phi_plus.clone(),
            phi_plus: self.phi_minus.clone(),
            a_check: None,
        }
    }
}

/// Composition `ψ ∘ φ : A -> C` of `φ : A -> B` and `ψ : B -> C`:
/// minus maps compose forward, plus maps backward; truncations propagate.
pub fn compose(phi: &Morphism, psi: &Morphism) -> Result<Morphism> {
    if phi.target.name != psi.source.name {
        return Err(Error::ComposeMismatch {
            left: phi.target.name.clone(),
            right: psi.source.name.clone(),
        });
    }
    let pm1 = phi.phi_minus.clone();
    let pm2 = psi.phi_minus.clone();
    let pp1 = phi.phi_plus.clone();
    let pp2 = psi.phi_plus.clone();
    Ok(Morphism {
        name: format!("{};{}", phi.name, psi.name),
        source: phi.source.clone(),
        target: psi.target.clone(),
        phi_minus: Arc::new(move |a, w| {
            let mid = pm1(a, w)?;
            pm2(&mid, w)
        }),
        phi_plus: Arc::new(move |c, w| {
            let mid = pp2(c, w)?;
            pp1(&mid, w)
        }),
        a_check: phi.a_check.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tukey::{sys_dominating, Carrier};

    fn word(v: &[u64]) -> Carrier {
        Carrier::Word { word: v.to_vec() }
    }

    #[test]
    fn identity_composition_laws() {
        let d = sys_dominating();
        let id = Morphism::identity(d.clone());
        let comp = compose(&id, &id).unwrap();
        let w = Window::new(0, 3, 8).unwrap();
        let a = word(&[1, 2, 3]);
        assert_eq!(comp.minus(&a, &w).unwrap(), a);
        assert_eq!(comp.plus(&a, &w).unwrap(), a);
    }

    #[test]
    fn dual_of_dual_is_componentwise_identity() {
        let d = sys_dominating();
        let id = Morphism::identity(d);
        let dd = id.dual().dual();
        let w = Window::new(0, 3, 8).unwrap();
        let a = word(&[4, 5, 6]);
        assert_eq!(dd.minus(&a, &w).unwrap(), id.minus(&a, &w).unwrap());
        assert_eq!(dd.plus(&a, &w).unwrap(), id.plus(&a, &w).unwrap());
        assert_eq!(dd.source.minus, id.source.minus);
        assert_eq!(dd.target.plus, id.target.plus);
    }

    #[test]
    fn composition_requires_matching_systems() {
        let d = sys_dominating();
        let b = crate::tukey::sys_bounding();
        let r = compose(&Morphism::identity(d), &Morphism::identity(b));
        assert!(r.is_err());
    }
}
