//! Binary and ternary symbol strings.
//!
//! Text form is ASCII: `0`/`1` for bits and `E` for an erased position.
//! Whitespace inside a string is ignored when parsing, so `1 0 1` and `101`
//! read the same. Index 1 (position 0 in the backing vector) is the leftmost
//! symbol everywhere in this crate.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite sequence of bits stored one per byte (each byte is 0 or 1).
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// Builds a bit string from raw symbols, rejecting anything other than 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Parse(format!(
                "symbol {} at position {} is not a bit",
                bits[pos],
                pos + 1
            )));
        }
        Ok(Self(bits))
    }

    pub(crate) fn from_bits_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    /// Bit at 0-based position `i`.
    pub fn get(&self, i: usize) -> Option<u8> {
        self.0.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit as u8);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    /// Copy of the bits in a 0-based half-open range.
    pub fn slice(&self, range: Range<usize>) -> BitString {
        Self(self.0[range].to_vec())
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a BitString>) -> BitString {
        let mut out = Vec::new();
        for p in parts {
            out.extend_from_slice(&p.0);
        }
        Self(out)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars().filter(|c| !c.is_ascii_whitespace()) {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => return Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            }
        }
        Ok(Self(bits))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        Self(bits.iter().map(|&b| b as u8).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Symbol::Zero
        } else {
            Symbol::One
        }
    }

    pub fn bit(self) -> Option<u8> {
        match self {
            Symbol::Zero => Some(0),
            Symbol::One => Some(1),
            Symbol::Erased => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Erased => 'E',
        }
    }
}

/// A string over {0, 1, E}.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct TernaryString(Vec<Symbol>);

impl TernaryString {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn erasure_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == Symbol::Erased).count()
    }

    /// 0-based positions of erased symbols.
    pub fn erased_positions(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == Symbol::Erased)
            .map(|(i, _)| i)
            .collect()
    }

    /// Converts to a bit string when no symbol is erased.
    pub fn to_bits(&self) -> Option<BitString> {
        self.0
            .iter()
            .map(|s| s.bit())
            .collect::<Option<Vec<u8>>>()
            .map(BitString::from_bits_unchecked)
    }
}

impl From<&BitString> for TernaryString {
    fn from(bits: &BitString) -> Self {
        Self(bits.iter().map(Symbol::from_bit).collect())
    }
}

impl From<BitString> for TernaryString {
    fn from(bits: BitString) -> Self {
        Self::from(&bits)
    }
}

impl FromStr for TernaryString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut symbols = Vec::with_capacity(s.len());
        for c in s.chars().filter(|c| !c.is_ascii_whitespace()) {
            symbols.push(match c {
                '0' => Symbol::Zero,
                '1' => Symbol::One,
                'E' | 'e' => Symbol::Erased,
                other => return Err(Error::Parse(format!("unexpected character {other:?} in ternary string"))),
            });
        }
        Ok(Self(symbols))
    }
}

impl fmt::Display for TernaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for TernaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryString({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ignores_whitespace() {
        let a: BitString = "1 0 1 1".parse().unwrap();
        let b: BitString = "1011".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1011");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("10a1".parse::<BitString>().is_err());
        assert!("10E1".parse::<BitString>().is_err());
        assert!(BitString::from_bits(vec![0, 2]).is_err());
    }

    #[test]
    fn ternary_roundtrip_and_erasures() {
        let t: TernaryString = "10E1E".parse().unwrap();
        assert_eq!(t.to_string(), "10E1E");
        assert_eq!(t.erasure_count(), 2);
        assert_eq!(t.erased_positions(), vec![2, 4]);
        assert!(t.to_bits().is_none());

        let clean: TernaryString = "0110".parse().unwrap();
        assert_eq!(clean.to_bits().unwrap().to_string(), "0110");
    }
}
