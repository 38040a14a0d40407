//! Letter domains (finite alphabets and real intervals) and codomain kinds.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("alphabet letter {0} is repeated")]
    DuplicateLetter(Value),
    #[error("alphabet letter {0} is not a plain letter")]
    NotALetter(Value),
    #[error("interval [{lo}, {hi}] is trivial: need lo < hi")]
    TrivialInterval { lo: f64, hi: f64 },
}

/// An explicitly ordered finite set of letters.
#[derive(Clone, Debug, PartialEq)]
pub struct Alphabet {
    letters: Vec<Value>,
    index: Option<HashMap<Value, usize>>,
}

const LINEAR_LOOKUP_LIMIT: usize = 16;

impl Alphabet {
    pub fn new(letters: Vec<Value>) -> Result<Self, DomainError> {
        if letters.is_empty() {
            return Err(DomainError::EmptyAlphabet);
        }
        let mut seen = HashMap::with_capacity(letters.len());
        for (i, l) in letters.iter().enumerate() {
            if matches!(l, Value::Eps | Value::Word(_)) {
                return Err(DomainError::NotALetter(l.clone()));
            }
            if seen.insert(l.clone(), i).is_some() {
                return Err(DomainError::DuplicateLetter(l.clone()));
            }
        }
        let index = (letters.len() > LINEAR_LOOKUP_LIMIT).then_some(seen);
        Ok(Alphabet { letters, index })
    }

    /// Single-character symbols: `Alphabet::syms("ab")`.
    pub fn syms(s: &str) -> Self {
        Self::new(s.chars().map(|c| Value::sym(&c.to_string())).collect()).expect("valid alphabet")
    }

    /// Integer letters `0, ..., m-1`.
    pub fn integers(m: usize) -> Self {
        Self::new((0..m as i64).map(Value::Int).collect()).expect("valid alphabet")
    }

    pub fn letters(&self) -> &[Value] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, letter: &Value) -> Option<usize> {
        match &self.index {
            Some(map) => map.get(letter).copied(),
            None => self.letters.iter().position(|l| l == letter),
        }
    }

    pub fn contains(&self, letter: &Value) -> bool {
        self.index_of(letter).is_some()
    }

    /// True when every letter is a one-character symbol, so words can be
    /// written without separators.
    pub fn is_compact(&self) -> bool {
        self.letters.iter().all(|l| matches!(l, Value::Sym(s) if s.chars().count() == 1))
    }
}

/// A nontrivial real interval with open/closed endpoint flags; endpoints may
/// be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self, DomainError> {
        if !(lo < hi) {
            return Err(DomainError::TrivialInterval { lo, hi });
        }
        Ok(Interval { lo, hi, lo_closed: lo_closed && lo.is_finite(), hi_closed: hi_closed && hi.is_finite() })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self, DomainError> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self, DomainError> {
        Self::new(lo, hi, false, false)
    }

    pub fn reals() -> Self {
        Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY, lo_closed: false, hi_closed: false }
    }

    pub fn positive() -> Self {
        Interval { lo: 0.0, hi: f64::INFINITY, lo_closed: false, hi_closed: false }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_closed_bounded(&self) -> bool {
        self.is_bounded() && self.lo_closed && self.hi_closed
    }

    /// Whether `other` lies inside `self`.
    pub fn includes(&self, other: &Interval) -> bool {
        let lo_ok = other.lo > self.lo || (other.lo == self.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok = other.hi < self.hi || (other.hi == self.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }

    /// Lowest point usable as a sample; open endpoints are nudged inward.
    pub fn sample_lo(&self) -> f64 {
        if self.lo_closed {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * 1e-9
        }
    }

    pub fn sample_hi(&self) -> f64 {
        if self.hi_closed {
            self.hi
        } else {
            self.hi - (self.hi - self.lo) * 1e-9
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { ']' };
        let r = if self.hi_closed { ']' } else { '[' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Finite(Alphabet),
    Real(Interval),
}

impl Domain {
    pub fn contains(&self, letter: &Value) -> bool {
        match self {
            Domain::Finite(a) => a.contains(letter),
            Domain::Real(i) => matches!(letter, Value::Real(x) if i.contains(*x)),
        }
    }

    pub fn alphabet(&self) -> Option<&Alphabet> {
        match self {
            Domain::Finite(a) => Some(a),
            Domain::Real(_) => None,
        }
    }

    pub fn interval(&self) -> Option<&Interval> {
        match self {
            Domain::Real(i) => Some(i),
            Domain::Finite(_) => None,
        }
    }
}

/// Where an operation's values live.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Codomain {
    /// `X ∪ {ε}`: values can be fed back in as letters.
    DomainWithEpsilon,
    /// Any other value set, described by name (e.g. `naturals`, `reals`).
    External(String),
}

impl Codomain {
    pub fn is_domain(&self) -> bool {
        matches!(self, Codomain::DomainWithEpsilon)
    }

    pub fn describe(&self) -> String {
        match self {
            Codomain::DomainWithEpsilon => "domain+epsilon".to_string(),
            Codomain::External(s) => s.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates_and_eps() {
        assert_eq!(Alphabet::new(vec![]).unwrap_err(), DomainError::EmptyAlphabet);
        assert!(matches!(
            Alphabet::new(vec![Value::sym("a"), Value::sym("a")]),
            Err(DomainError::DuplicateLetter(_))
        ));
        assert!(Alphabet::new(vec![Value::Eps]).is_err());
    }

    #[test]
    fn large_alphabets_use_hashed_lookup() {
        let a = Alphabet::integers(40);
        assert_eq!(a.index_of(&Value::Int(37)), Some(37));
        assert_eq!(a.index_of(&Value::Int(40)), None);
    }

    #[test]
    fn interval_membership() {
        let i = Interval::new(0.0, 1.0, true, false).unwrap();
        assert!(i.contains(0.0));
        assert!(!i.contains(1.0));
        assert!(Interval::closed(1.0, 1.0).is_err());
        assert!(Interval::positive().includes(&Interval::closed(1.0, 2.0).unwrap()));
        assert!(!Interval::positive().includes(&Interval::closed(0.0, 2.0).unwrap()));
        assert!(i.sample_hi() < 1.0);
    }
}
