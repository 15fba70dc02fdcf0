//! Finite binary strings and prefix-free sets.
//!
//! Strings are ordered length-then-lexicographically, i.e. in the
//! enumeration order `λ, 0, 1, 00, 01, 10, 11, 000, …`, and are
//! identified with natural numbers through [`index_of`] / [`string_at`]:
//! the index of `s` is the value of the binary numeral `1·s` minus one.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigUint;
use num::{One, Zero};
use thiserror::Error;

use crate::numerics::Dyadic;

/// A finite binary string. The empty string λ is `BitString::empty()`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitStringError {
    #[error("invalid character {0:?} in bit string (expected '0' or '1')")]
    InvalidChar(char),
}

impl BitString {
    pub fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        BitString {
            bits: bits.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn pop(&mut self) -> Option<bool> {
        self.bits.pop()
    }

    /// `self` followed by `bit`, as a new string.
    pub fn child(&self, bit: bool) -> Self {
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.extend_from_slice(&self.bits);
        bits.push(bit);
        BitString { bits }
    }

    /// Append a copy of the entire current contents (the DUP effect).
    pub fn double(&mut self) {
        let copy = self.bits.clone();
        self.bits.extend(copy);
    }

    /// Drop the final bit; `None` for λ.
    pub fn parent(&self) -> Option<Self> {
        if self.bits.is_empty() {
            None
        } else {
            Some(BitString {
                bits: self.bits[..self.bits.len() - 1].to_vec(),
            })
        }
    }

    /// The first half of an even-length string, if the second half repeats it.
    pub fn square_root(&self) -> Option<Self> {
        let n = self.bits.len();
        if n == 0 || n % 2 != 0 {
            return None;
        }
        let (a, b) = self.bits.split_at(n / 2);
        if a == b {
            Some(BitString { bits: a.to_vec() })
        } else {
            None
        }
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.len() >= self.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }

    /// Index in the enumeration order: the dyadic value of `1·s`, minus one.
    pub fn index(&self) -> BigUint {
        let mut n = BigUint::one();
        for &b in &self.bits {
            n <<= 1u8;
            if b {
                n += 1u8;
            }
        }
        n - BigUint::one()
    }

    /// The string at `index` in the enumeration order (inverse of [`BitString::index`]).
    pub fn at_index(index: &BigUint) -> Self {
        let n = index + BigUint::one();
        let total = n.bits();
        let mut bits = Vec::with_capacity(total.saturating_sub(1) as usize);
        // Skip the leading 1 of the numeral `1·s`.
        for i in (0..total.saturating_sub(1)).rev() {
            bits.push(n.bit(i));
        }
        BitString { bits }
    }

    /// Predecessor in the enumeration order; `None` for λ.
    pub fn predecessor(&self) -> Option<Self> {
        let idx = self.index();
        if idx.is_zero() {
            None
        } else {
            Some(Self::at_index(&(idx - BigUint::one())))
        }
    }

    /// Successor in the enumeration order.
    pub fn successor(&self) -> Self {
        Self::at_index(&(self.index() + BigUint::one()))
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits
            .len()
            .cmp(&other.bits.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            f.write_str("λ")
        } else {
            write!(f, "{self}")
        }
    }
}

impl FromStr for BitString {
    type Err = BitStringError;

    /// Parse an ASCII 0/1 string; the empty token is λ.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(BitStringError::InvalidChar(other)),
            }
        }
        Ok(BitString { bits })
    }
}

/// φ(s): the index of `s` in the enumeration order `λ,0,1,00,…`.
pub fn index_of(s: &BitString) -> BigUint {
    s.index()
}

/// Inverse of [`index_of`].
pub fn string_at(n: u64) -> BitString {
    BitString::at_index(&BigUint::from(n))
}

/// A finite, duplicate-free set of strings (sorted in enumeration order).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StringSet {
    members: BTreeSet<BitString>,
}

impl StringSet {
    pub fn new() -> Self {
        StringSet {
            members: BTreeSet::new(),
        }
    }

    pub fn insert(&mut self, s: BitString) -> bool {
        self.members.insert(s)
    }

    pub fn contains(&self, s: &BitString) -> bool {
        self.members.contains(s)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitString> {
        self.members.iter()
    }
}

impl FromIterator<BitString> for StringSet {
    fn from_iter<I: IntoIterator<Item = BitString>>(iter: I) -> Self {
        StringSet {
            members: iter.into_iter().collect(),
        }
    }
}

/// True iff no member is a prefix of a distinct member.
///
/// Sorting lexicographically (prefix-first) makes every prefix pair
/// adjacent, so one linear scan suffices.
pub fn is_prefix_free(set: &StringSet) -> bool {
    let mut sorted: Vec<&BitString> = set.iter().collect();
    sorted.sort_by(|a, b| a.bits().cmp(b.bits()));
    sorted.windows(2).all(|w| !w[0].is_prefix_of(w[1]))
}

/// Σ 2^{-|s|} over the set, exactly.
pub fn kraft_sum(set: &StringSet) -> Dyadic {
    let mut total = Dyadic::zero();
    for s in set.iter() {
        total = total.add(&Dyadic::two_pow(-(s.len() as i64)));
    }
    total
}
