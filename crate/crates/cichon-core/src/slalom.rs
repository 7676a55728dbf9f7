//! Slaloms: sequences of finite traps with a certified weight bound
//! `Σ |S(n)| / 2^n <= w`.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A finite slalom prefix with its weight certificate. Trap entries are
/// family indices (arbitrary-precision), so the same type carries slaloms
/// over clopen codes and over small block indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slalom {
    #[serde(with = "crate::json_int::biguint_set_vec")]
    pub traps: Vec<BTreeSet<BigUint>>,
    pub weight_cert: Dyadic,
}

impl Slalom {
    pub fn new(traps: Vec<BTreeSet<BigUint>>, weight_cert: Dyadic) -> Result<Self> {
        let s = Slalom { traps, weight_cert };
        if s.partial_weight() > s.weight_cert {
            return Err(Error::Precondition(format!(
                "slalom prefix weight {} exceeds certificate {}",
                s.partial_weight(),
                s.weight_cert
            )));
        }
        Ok(s)
    }

    /// Exact weight of the prefix: `Σ_n |S(n)| / 2^n`.
    pub fn partial_weight(&self) -> Dyadic {
        let mut acc = Dyadic::zero();
        for (n, t) in self.traps.iter().enumerate() {
            acc = acc.add(&Dyadic::from_u64(t.len() as u64).shr(n as u32));
        }
        acc
    }

    /// Remaining certified weight for the unseen tail.
    pub fn tail_budget(&self) -> Dyadic {
        self.weight_cert
            .checked_sub(&self.partial_weight())
            .unwrap_or_else(|_| Dyadic::zero())
    }

    pub fn horizon(&self) -> u32 {
        self.traps.len() as u32
    }

    pub fn trap(&self, n: u32) -> Option<&BTreeSet<BigUint>> {
        self.traps.get(n as usize)
    }

    /// Levelwise inclusion of traps on `[n0, up_to)`.
    pub fn included_in_on(&self, other: &Slalom, n0: u32, up_to: u32) -> Option<bool> {
        for n in n0..up_to {
            match (self.trap(n), other.trap(n)) {
                (Some(a), Some(b)) => {
                    if !a.is_subset(b) {
                        return Some(false);
                    }
                }
                _ => return None,
            }
        }
        Some(true)
    }

    pub fn from_u64_traps(traps: Vec<Vec<u64>>, weight_cert: Dyadic) -> Result<Self> {
        Slalom::new(
            traps
                .into_iter()
                .map(|t| t.into_iter().map(BigUint::from).collect())
                .collect(),
            weight_cert,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_accounting() {
        let s = Slalom::from_u64_traps(vec![vec![1], vec![2, 3], vec![]], Dyadic::from_u64(4))
            .unwrap();
        // 1/1 + 2/2 + 0/4 = 2
        assert_eq!(s.partial_weight(), Dyadic::from_u64(2));
        assert_eq!(s.tail_budget(), Dyadic::from_u64(2));
        assert!(Slalom::from_u64_traps(vec![vec![1, 2, 3]], Dyadic::one()).is_err());
    }

    #[test]
    fn levelwise_inclusion() {
        let a = Slalom::from_u64_traps(vec![vec![1], vec![2]], Dyadic::from_u64(2)).unwrap();
        let b =
            Slalom::from_u64_traps(vec![vec![1, 5], vec![2, 7]], Dyadic::from_u64(4)).unwrap();
        assert_eq!(a.included_in_on(&b, 0, 2), Some(true));
        assert_eq!(b.included_in_on(&a, 0, 2), Some(false));
        assert_eq!(a.included_in_on(&b, 0, 3), None);
    }
}
