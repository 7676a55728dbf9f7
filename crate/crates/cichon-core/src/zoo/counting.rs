//! The counting-function morphism: a set maps to its growth profile
//! `X̄(n) = |X ∩ n|`, a profile maps back to its step set. If the
//! profile of `X` fails to dominate that of `Y` somewhere in the window,
//! some element of `Y` below that point is missing from `X`.

use crate::pideal::{count_profile, set_from_profile, IdealElement};
use crate::error::Truncation;
use crate::tukey::morphism::Morphism;
use crate::tukey::{sys_counting, sys_ideal, Carrier, Verdict};
use std::sync::Arc;

/// `(J, J, ⊉*) ⪯ (X, X, ⋡*)`.
pub fn m_ideal_to_counting() -> Morphism {
    Morphism {
        name: "ideal_to_counting".into(),
        source: sys_ideal(),
        target: sys_counting(),
        phi_minus: Arc::new(|a, w| {
            let x = a.as_ideal().expect("ideal carrier");
            let levels = (w.n_end + 1).min(x.resolution().min(u32::MAX as u64) as u32);
            let profile =
                count_profile(x, levels).map_err(|_| Truncation::new(0, "resolution"))?;
            Ok(Carrier::Count { profile })
        }),
        phi_plus: Arc::new(|b, _w| {
            let profile = b.as_count().expect("count carrier");
            let support =
                set_from_profile(profile).map_err(|_| Truncation::new(0, "profile-shape"))?;
            Ok(Carrier::Ideal(
                IdealElement::explicit(support).map_err(|_| Truncation::new(0, "support"))?,
            ))
        }),
        // Witness: an explicit element of Y \ X below the window end and
        // the certificates' resolution.
        a_check: Some(Arc::new(|a, _b, yb, w| {
            let (x, y) = (a.as_ideal().unwrap(), yb.as_ideal().unwrap());
            let up = (w.n_end as u64).min(x.resolution()).min(y.resolution());
            for &i in &y.support {
                if i < up && !x.support.contains(&i) {
                    return Verdict::Holds;
                }
            }
            Verdict::Unknown
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tukey::Window;

    #[test]
    fn contract_on_explicit_sets() {
        let m = m_ideal_to_counting();
        let w = Window::new(2, 12, 12).unwrap();
        let x = IdealElement::explicit([2, 4, 8]).unwrap();
        let y = IdealElement::explicit([2, 3, 4, 8]).unwrap();
        let xbar = m.minus(&Carrier::Ideal(x.clone()), &w).unwrap();
        let ybar = m.minus(&Carrier::Ideal(y.clone()), &w).unwrap();
        // B: X̄ fails to dominate Ȳ (Y has an extra early element).
        let b = m.target.eval(&xbar, &ybar, &w);
        assert!(b.is_holds());
        // φ_+ recovers Y from its profile.
        let back = m.plus(&ybar, &w).unwrap();
        assert_eq!(back.as_ideal().unwrap().support, y.support);
        // A: Y is not almost-contained in X, witnessed below the window.
        let a = m.check_a(&Carrier::Ideal(x), &back, &w);
        assert!(a.is_holds());
    }
}
