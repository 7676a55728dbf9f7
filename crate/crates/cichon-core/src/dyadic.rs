//! Exact dyadic rationals `num / 2^exp`.
//!
//! All measure bookkeeping in this crate is exact; there is no floating
//! point anywhere. Values are kept reduced (odd numerator, or zero with
//! exponent zero) so equality is structural.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// Nonnegative dyadic rational in reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    exp: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            num: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigUint::one(),
            exp: 0,
        }
    }

    /// `1 / 2^n`.
    pub fn pow2_neg(n: u32) -> Self {
        Dyadic {
            num: BigUint::one(),
            exp: n,
        }
    }

    /// `num / 2^exp`, reduced.
    pub fn new(num: BigUint, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.reduce();
        d
    }

    pub fn from_u64(v: u64) -> Self {
        Dyadic {
            num: BigUint::from(v),
            exp: 0,
        }
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp as u64) as u32;
        if shift > 0 {
            self.num >>= shift as usize;
            self.exp -= shift;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    /// Numerator after rescaling to denominator `2^exp`; `None` if that
    /// denominator is too coarse to represent the value exactly.
    pub fn scaled_numerator(&self, exp: u32) -> Option<BigUint> {
        if exp < self.exp {
            return None;
        }
        Some(&self.num << ((exp - self.exp) as usize))
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.max(other.exp);
        let a = &self.num << ((exp - self.exp) as usize);
        let b = &other.num << ((exp - other.exp) as usize);
        Dyadic::new(a + b, exp)
    }

    pub fn checked_sub(&self, other: &Dyadic) -> Result<Dyadic> {
        let exp = self.exp.max(other.exp);
        let a = &self.num << ((exp - self.exp) as usize);
        let b = &other.num << ((exp - other.exp) as usize);
        if a < b {
            return Err(Error::NegativeDyadic);
        }
        Ok(Dyadic::new(a - b, exp))
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &other.num, self.exp + other.exp)
    }

    /// Value divided by `2^n`.
    pub fn shr(&self, n: u32) -> Dyadic {
        if self.num.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            num: self.num.clone(),
            exp: self.exp + n,
        }
    }

    /// Value multiplied by `2^n`.
    pub fn shl(&self, n: u32) -> Dyadic {
        Dyadic::new(self.num.clone() << n as usize, self.exp)
    }

    pub fn le_pow2_neg(&self, n: u32) -> bool {
        *self <= Dyadic::pow2_neg(n)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = &self.num << ((exp - self.exp) as usize);
        let b = &other.num << ((exp - other.exp) as usize);
        a.cmp(&b)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

/// Wire form `{"num": N, "exp": E}` with an arbitrary-precision numerator.
impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Dyadic", 2)?;
        st.serialize_field("num", &crate::json_int::BigJson(self.num.clone()))?;
        st.serialize_field("exp", &self.exp)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: crate::json_int::BigJson,
            exp: u32,
        }
        let raw = Raw::deserialize(d)?;
        let d = Dyadic::new(raw.num.0, raw.exp);
        Ok(d)
    }
}

// Serde validation: a non-reduced wire value is accepted and reduced; byte
// exactness of round-trips is guaranteed for values we emit.
#[allow(unused)]
fn _assert_send_sync() {
    fn f<T: Send + Sync>() {}
    f::<Dyadic>();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_equality() {
        let a = Dyadic::new(BigUint::from(4u32), 3); // 4/8 = 1/2
        assert_eq!(a, Dyadic::pow2_neg(1));
        assert_eq!(a.exponent(), 1);
    }

    #[test]
    fn arithmetic() {
        let half = Dyadic::pow2_neg(1);
        let eighth = Dyadic::pow2_neg(3);
        let sum = half.add(&eighth); // 5/8
        assert_eq!(sum, Dyadic::new(BigUint::from(5u32), 3));
        assert_eq!(sum.checked_sub(&eighth).unwrap(), half);
        assert!(eighth.checked_sub(&half).is_err());
        assert!(eighth < half);
        assert!(sum.le_pow2_neg(0));
        assert!(!sum.le_pow2_neg(1));
    }

    #[test]
    fn json_round_trip() {
        let v = Dyadic::new(BigUint::from(5u32), 3);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"num":5,"exp":3}"#);
        let back: Dyadic = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
