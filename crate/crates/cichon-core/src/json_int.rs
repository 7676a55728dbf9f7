//! Arbitrary-precision integers on the JSON wire.
//!
//! Code indices and dyadic numerators can exceed `u64`. They are emitted as
//! plain JSON numbers (the grammar puts no bound on integer size), relying
//! on `serde_json`'s `arbitrary_precision` feature to carry the digits
//! through unchanged.

use num_bigint::BigUint;
use num_traits::Num;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Newtype bridging `BigUint` and JSON numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigJson(pub BigUint);

impl Serialize for BigJson {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = serde_json::Number::from_string_unchecked(self.0.to_str_radix(10));
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BigJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        let s = n.to_string();
        if s.starts_with('-') || s.contains('.') || s.contains('e') || s.contains('E') {
            return Err(D::Error::custom(format!(
                "expected a nonnegative integer, got {s}"
            )));
        }
        let v = BigUint::from_str_radix(&s, 10)
            .map_err(|e| D::Error::custom(format!("bad integer {s}: {e}")))?;
        Ok(BigJson(v))
    }
}

/// Serialize a `Vec<BigUint>` as a JSON array of numbers.
pub mod biguint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&BigJson(x.clone()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw = Vec::<BigJson>::deserialize(d)?;
        Ok(raw.into_iter().map(|b| b.0).collect())
    }
}

/// Serialize trap lists (`Vec<BTreeSet<BigUint>>`) as arrays of number
/// arrays.
pub mod biguint_set_vec {
    use super::*;
    use std::collections::BTreeSet;

    pub fn serialize<S: Serializer>(
        v: &[BTreeSet<BigUint>],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let raw: Vec<Vec<BigJson>> = v
            .iter()
            .map(|t| t.iter().map(|x| BigJson(x.clone())).collect())
            .collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Vec<BTreeSet<BigUint>>, D::Error> {
        let raw = Vec::<Vec<BigJson>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|t| t.into_iter().map(|b| b.0).collect())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_numbers_survive_json() {
        let v = BigUint::parse_bytes(b"123456789012345678901234567890123456789", 10).unwrap();
        let s = serde_json::to_string(&BigJson(v.clone())).unwrap();
        assert_eq!(s, "123456789012345678901234567890123456789");
        let back: BigJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, v);
    }
}
