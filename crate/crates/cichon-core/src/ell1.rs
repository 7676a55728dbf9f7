//! Summable sequences of nonnegative dyadics with a certified sum bound.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ell1Seq {
    pub prefix: Vec<Dyadic>,
    pub sum_cert: Dyadic,
}

impl Ell1Seq {
    pub fn new(prefix: Vec<Dyadic>, sum_cert: Dyadic) -> Result<Self> {
        let s = Ell1Seq { prefix, sum_cert };
        if s.partial_sum() > s.sum_cert {
            return Err(Error::Precondition(format!(
                "prefix sum {} exceeds certificate {}",
                s.partial_sum(),
                s.sum_cert
            )));
        }
        Ok(s)
    }

    pub fn partial_sum(&self) -> Dyadic {
        let mut acc = Dyadic::zero();
        for v in &self.prefix {
            acc = acc.add(v);
        }
        acc
    }

    pub fn horizon(&self) -> u32 {
        self.prefix.len() as u32
    }

    pub fn value(&self, n: u32) -> Option<&Dyadic> {
        self.prefix.get(n as usize)
    }

    /// Pointwise `<=` on `[n0, up_to)`.
    pub fn dominated_by_on(&self, other: &Ell1Seq, n0: u32, up_to: u32) -> Option<bool> {
        for n in n0..up_to {
            match (self.value(n), other.value(n)) {
                (Some(a), Some(b)) => {
                    if a > b {
                        return Some(false);
                    }
                }
                _ => return None,
            }
        }
        Some(true)
    }
}
