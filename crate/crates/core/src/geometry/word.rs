use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::GeometryError;

/// One of the four generators of the free group on two letters.
///
/// Order is `a < A < b < B`, which fixes every lexicographic choice made
/// downstream (canonical path forms, deterministic traversals).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    /// Horizontal steps move along the first generator.
    pub fn is_horizontal(self) -> bool {
        matches!(self, Letter::A | Letter::AInv)
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'A' => Some(Letter::AInv),
            'b' => Some(Letter::B),
            'B' => Some(Letter::BInv),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

type Letters = SmallVec<[Letter; 32]>;

/// A freely reduced word, i.e. a vertex of the Cayley tree.
///
/// Ordering is shortlex-free plain lexicographic over letters, which is what
/// `Vec` gives; it is only used for determinism.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ReducedWord(Letters);

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord(Letters::new())
    }

    pub fn letter(l: Letter) -> Self {
        let mut v = Letters::new();
        v.push(l);
        ReducedWord(v)
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out = Letters::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ReducedWord(out)
    }

    /// Builds `x^k` for a letter and signed exponent.
    pub fn power(l: Letter, k: i64) -> Self {
        let l = if k < 0 { l.inverse() } else { l };
        ReducedWord(std::iter::repeat(l).take(k.unsigned_abs() as usize).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Self {
        ReducedWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Right multiplication by a single generator: the neighbour `self * l`.
    pub fn mul_letter(&self, l: Letter) -> Self {
        let mut out = self.0.clone();
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
        ReducedWord(out)
    }

    pub fn mul(&self, rhs: &ReducedWord) -> Self {
        let k = self
            .0
            .iter()
            .rev()
            .zip(rhs.0.iter())
            .take_while(|(x, y)| **x == y.inverse())
            .count();
        let mut out: Letters = self.0[..self.0.len() - k].iter().copied().collect();
        out.extend_from_slice(&rhs.0[k..]);
        ReducedWord(out)
    }

    /// `self^{-1} * rhs` without allocating the inverse.
    pub fn left_divide(&self, rhs: &ReducedWord) -> Self {
        let k = common_prefix(&self.0, &rhs.0);
        let mut out: Letters = self.0[k..].iter().rev().map(|l| l.inverse()).collect();
        out.extend_from_slice(&rhs.0[k..]);
        ReducedWord(out)
    }

    /// Tree distance between two vertices.
    pub fn distance(&self, other: &ReducedWord) -> usize {
        let k = common_prefix(&self.0, &other.0);
        self.0.len() + other.0.len() - 2 * k
    }

    pub fn neighbours(&self) -> [ReducedWord; 4] {
        Letter::ALL.map(|l| self.mul_letter(l))
    }

    /// The letter `s` with `self * s == other`, if the two are adjacent.
    pub fn step_to(&self, other: &ReducedWord) -> Option<Letter> {
        let d = self.left_divide(other);
        if d.len() == 1 {
            Some(d.0[0])
        } else {
            None
        }
    }
}

fn common_prefix(x: &[Letter], y: &[Letter]) -> usize {
    x.iter().zip(y).take_while(|(a, b)| a == b).count()
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ReducedWord {
    type Err = GeometryError;

    /// Accepts `e` or the empty string for the identity; other input is
    /// freely reduced.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" {
            return Ok(ReducedWord::identity());
        }
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            letters.push(Letter::from_char(c).ok_or_else(|| GeometryError::BadLetter(c))?);
        }
        Ok(ReducedWord::reduce(letters))
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReducedWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn parse_reduces() {
        assert_eq!(w("aAbB"), ReducedWord::identity());
        assert_eq!(w("abBa").to_string(), "aa");
        assert_eq!(w("e").to_string(), "e");
        assert!("abx".parse::<ReducedWord>().is_err());
    }

    #[test]
    fn multiplication_and_division_agree() {
        let x = w("abAb");
        let y = w("BaBa");
        assert_eq!(x.mul(&y), ReducedWord::reduce(x.letters().iter().chain(y.letters()).copied()));
        assert_eq!(x.left_divide(&y), x.inverse().mul(&y));
        assert_eq!(x.mul(&x.inverse()), ReducedWord::identity());
    }

    #[test]
    fn distance_through_common_prefix() {
        assert_eq!(w("aab").distance(&w("aB")), 3);
        assert_eq!(w("e").distance(&w("bbb")), 3);
        assert_eq!(w("ab").step_to(&w("abA")), Some(Letter::AInv));
        assert_eq!(w("ab").step_to(&w("a")), Some(Letter::BInv));
        assert_eq!(w("ab").step_to(&w("b")), None);
    }

    #[test]
    fn letter_order_is_a_then_inverse() {
        let mut ls = vec![Letter::BInv, Letter::B, Letter::AInv, Letter::A];
        ls.sort();
        assert_eq!(ls, Letter::ALL.to_vec());
    }
}
