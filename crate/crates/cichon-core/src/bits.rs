//! Finite binary words: cylinder stems and point prefixes.
//!
//! The derived `Ord` is dictionary order (prefixes sort first), which for an
//! antichain coincides with the left-to-right order of the corresponding
//! dyadic intervals. The basic-set enumeration `U_n` sorts by (length, lex)
//! with `U_0` the empty word, i.e. the whole space.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Hard cap on word length; everything in this crate works at finite depth.
pub const MAX_LEN: usize = 120;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.len() > MAX_LEN {
            return Err(Error::DepthCap(bits.len(), MAX_LEN));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parse("bit out of range".into()));
        }
        Ok(BitString { bits })
    }

    /// The `i`-th word of length `len` in lexicographic order.
    pub fn from_value(value: u128, len: usize) -> Result<Self> {
        if len > MAX_LEN {
            return Err(Error::DepthCap(len, MAX_LEN));
        }
        if len < 128 && value >= (1u128 << len) {
            return Err(Error::Parse(format!("value {value} too big for {len} bits")));
        }
        let bits = (0..len)
            .map(|i| ((value >> (len - 1 - i)) & 1) as u8)
            .collect();
        Ok(BitString { bits })
    }

    /// Lexicographic rank among words of the same length.
    pub fn value(&self) -> u128 {
        self.bits.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> Option<u8> {
        self.bits.get(i).copied()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn child(&self, b: u8) -> Result<Self> {
        let mut bits = self.bits.clone();
        bits.push(b & 1);
        Self::from_bits(bits)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.bits.is_empty() {
            return None;
        }
        let mut bits = self.bits.clone();
        bits.pop();
        Some(BitString { bits })
    }

    /// The word that differs in the last bit.
    pub fn sibling(&self) -> Option<Self> {
        if self.bits.is_empty() {
            return None;
        }
        let mut bits = self.bits.clone();
        let last = bits.len() - 1;
        bits[last] ^= 1;
        Some(BitString { bits })
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len() <= other.len() && other.bits[..self.len()] == self.bits[..]
    }

    /// Prefix comparability: one of the cylinders contains the other.
    pub fn comparable(&self, other: &BitString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn prefix(&self, len: usize) -> BitString {
        BitString {
            bits: self.bits[..len.min(self.bits.len())].to_vec(),
        }
    }

    /// Restriction to `[from, to)`, as a word.
    pub fn slice(&self, from: usize, to: usize) -> Option<BitString> {
        if to > self.bits.len() || from > to {
            return None;
        }
        Some(BitString {
            bits: self.bits[from..to].to_vec(),
        })
    }

    pub fn concat(&self, other: &BitString) -> Result<Self> {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self::from_bits(bits)
    }

    /// Coordinatewise XOR with the matching prefix of `x`. Requires
    /// `|x| >= |self|`.
    pub fn xor_prefix(&self, x: &BitString) -> Result<Self> {
        if x.len() < self.len() {
            return Err(Error::TranslationDepth {
                word: x.len(),
                depth: self.len() as u32,
            });
        }
        let bits = self
            .bits
            .iter()
            .zip(&x.bits)
            .map(|(&a, &b)| a ^ b)
            .collect();
        Ok(BitString { bits })
    }

    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "exhaustive word iteration capped");
        (0u128..(1u128 << len)).map(move |v| BitString::from_value(v, len).unwrap())
    }
}

/// The fixed basis enumeration: `U_0` is the whole space, then all words by
/// (length, lex).
pub fn basis_cylinder(n: u64) -> BitString {
    if n == 0 {
        return BitString::empty();
    }
    let len = 64 - (n + 1).leading_zeros() as usize - 1;
    let offset = (n + 1) as u128 - (1u128 << len);
    BitString::from_value(offset, len).expect("basis index in range")
}

/// Inverse of [`basis_cylinder`].
pub fn basis_index(t: &BitString) -> u64 {
    ((1u128 << t.len()) - 1 + t.value()) as u64
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return write!(f, "");
        }
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::Parse(format!("bad bit character {c:?}"))),
            })
            .collect::<Result<_>>()?;
        Self::from_bits(bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn dictionary_order() {
        assert!(bs("0") < bs("00"));
        assert!(bs("00") < bs("01"));
        assert!(bs("01") < bs("1"));
        assert!(BitString::empty() < bs("0"));
    }

    #[test]
    fn basis_enumeration_round_trip() {
        assert_eq!(basis_cylinder(0), BitString::empty());
        assert_eq!(basis_cylinder(1), bs("0"));
        assert_eq!(basis_cylinder(2), bs("1"));
        assert_eq!(basis_cylinder(3), bs("00"));
        assert_eq!(basis_cylinder(6), bs("11"));
        assert_eq!(basis_cylinder(7), bs("000"));
        for n in 0..200 {
            assert_eq!(basis_index(&basis_cylinder(n)), n);
        }
    }

    #[test]
    fn xor_translation() {
        assert_eq!(bs("01").xor_prefix(&bs("11")).unwrap(), bs("10"));
        assert_eq!(bs("0").xor_prefix(&bs("1")).unwrap(), bs("1"));
        assert!(bs("010").xor_prefix(&bs("1")).is_err());
    }

    #[test]
    fn prefix_relations() {
        assert!(bs("0").is_prefix_of(&bs("01")));
        assert!(!bs("01").is_prefix_of(&bs("0")));
        assert!(bs("01").comparable(&bs("0")));
        assert!(!bs("01").comparable(&bs("00")));
        assert_eq!(bs("0110").slice(1, 3).unwrap(), bs("11"));
    }
}
