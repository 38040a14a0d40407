//! Words (finite strings) over an arbitrary set of letters.
//!
//! Positions are 1-based everywhere in the public API: an [`IndexSet`] bound
//! to a word of length `n` holds positions in `{1, ..., n}`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::value::Value;

/// Longest word an [`IndexSet`] can be bound to.
pub const MAX_INDEXED_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("position {position} out of range for a word of length {bound}")]
    IndexOutOfRange { position: usize, bound: usize },
    #[error("index set is bound to length {expected} but the word has length {found}")]
    BoundMismatch { expected: usize, found: usize },
    #[error("replacement has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("index sets support words of length at most {MAX_INDEXED_LEN}, got {0}")]
    TooLong(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Value>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Value>) -> Self {
        Word(letters)
    }

    /// One letter per character: `Word::syms("abc")`.
    pub fn syms(s: &str) -> Self {
        Word(s.chars().map(|c| Value::sym(&c.to_string())).collect())
    }

    pub fn reals(xs: &[f64]) -> Self {
        Word(xs.iter().map(|&x| Value::Real(x)).collect())
    }

    pub fn single(letter: Value) -> Self {
        Word(vec![letter])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Value] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Value> {
        self.0
    }

    pub fn push(&mut self, letter: Value) {
        self.0.push(letter);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn concat_all<'a>(parts: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut out = Word::empty();
        for p in parts {
            out.extend_from(p);
        }
        out
    }

    /// `x^k`: `k` concatenated copies; `x^0 = ε`.
    pub fn power(&self, k: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            v.extend_from_slice(&self.0);
        }
        Word(v)
    }

    /// Letters at 0-based positions `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }

    /// `x|_K`: keeps the letters at positions in `K`, in their original order.
    pub fn restrict(&self, k: &IndexSet) -> Result<Word, WordError> {
        k.check_bound(self.len())?;
        Ok(Word(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| k.contains(i + 1))
                .map(|(_, l)| l.clone())
                .collect(),
        ))
    }

    /// The word `x'` with `x'|_K = r` and `x'|_{K^c} = x|_{K^c}`.
    pub fn splice(&self, k: &IndexSet, r: &Word) -> Result<Word, WordError> {
        k.check_bound(self.len())?;
        if r.len() != k.len() {
            return Err(WordError::LengthMismatch { expected: k.len(), found: r.len() });
        }
        let mut replacement = r.0.iter();
        Ok(Word(
            self.0
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    if k.contains(i + 1) {
                        replacement.next().expect("length checked").clone()
                    } else {
                        l.clone()
                    }
                })
                .collect(),
        ))
    }

    /// Removes the letter at 1-based position `pos`.
    pub fn without(&self, pos: usize) -> Word {
        let mut v = self.0.clone();
        v.remove(pos - 1);
        Word(v)
    }

    /// Swaps the letters at 1-based positions `i` and `j`.
    pub fn swapped(&self, i: usize, j: usize) -> Word {
        let mut v = self.0.clone();
        v.swap(i - 1, j - 1);
        Word(v)
    }

    pub fn to_reals(&self) -> Option<Vec<f64>> {
        self.0.iter().map(Value::as_real).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ε");
        }
        let compact = self.0.iter().all(|l| matches!(l, Value::Sym(s) if s.chars().count() == 1));
        if compact {
            for l in &self.0 {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            write!(f, "(")?;
            for (i, l) in self.0.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ")")
        }
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(Word(Vec::<Value>::deserialize(deserializer)?))
    }
}

/// A subset `K ⊆ {1, ..., n}` carrying its bound `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    bound: usize,
    mask: u64,
}

impl IndexSet {
    pub fn new(bound: usize, positions: impl IntoIterator<Item = usize>) -> Result<Self, WordError> {
        if bound > MAX_INDEXED_LEN {
            return Err(WordError::TooLong(bound));
        }
        let mut mask = 0u64;
        for p in positions {
            if p == 0 || p > bound {
                return Err(WordError::IndexOutOfRange { position: p, bound });
            }
            mask |= 1 << (p - 1);
        }
        Ok(IndexSet { bound, mask })
    }

    /// Bit `i` of `mask` selects position `i + 1`.
    pub fn from_mask(bound: usize, mask: u64) -> Result<Self, WordError> {
        if bound > MAX_INDEXED_LEN {
            return Err(WordError::TooLong(bound));
        }
        let valid = if bound == 64 { u64::MAX } else { (1u64 << bound) - 1 };
        if mask & !valid != 0 {
            let position = 64 - mask.leading_zeros() as usize;
            return Err(WordError::IndexOutOfRange { position, bound });
        }
        Ok(IndexSet { bound, mask })
    }

    pub fn empty(bound: usize) -> Result<Self, WordError> {
        Self::from_mask(bound, 0)
    }

    pub fn full(bound: usize) -> Result<Self, WordError> {
        Self::new(bound, 1..=bound)
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, position: usize) -> bool {
        position >= 1 && position <= self.bound && self.mask & (1 << (position - 1)) != 0
    }

    pub fn complement(&self) -> IndexSet {
        let valid = if self.bound == 64 { u64::MAX } else { (1u64 << self.bound) - 1 };
        IndexSet { bound: self.bound, mask: !self.mask & valid }
    }

    /// Sorted 1-based positions.
    pub fn positions(&self) -> Vec<usize> {
        (1..=self.bound).filter(|&p| self.contains(p)).collect()
    }

    fn check_bound(&self, len: usize) -> Result<(), WordError> {
        if self.bound != len {
            return Err(WordError::BoundMismatch { expected: self.bound, found: len });
        }
        Ok(())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.positions().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// `|alphabet|^n`, or `None` on overflow.
pub fn word_count(alphabet_size: usize, n: usize) -> Option<u64> {
    (alphabet_size as u64).checked_pow(u32::try_from(n).ok()?)
}

/// The `index`-th word of length `n` in lexicographic order (first letter
/// most significant).
pub fn word_at(alphabet: &[Value], n: usize, mut index: u64) -> Word {
    let base = alphabet.len() as u64;
    let mut letters = vec![Value::Eps; n];
    for slot in letters.iter_mut().rev() {
        *slot = alphabet[(index % base) as usize].clone();
        index /= base;
    }
    Word(letters)
}

/// All words of length `n` over `alphabet`, lexicographically.
pub fn enumerate_words(alphabet: &[Value], n: usize) -> impl Iterator<Item = Word> + '_ {
    assert!(!alphabet.is_empty(), "alphabet must be nonempty");
    let total = word_count(alphabet.len(), n).expect("word count overflows u64");
    (0..total).map(move |i| word_at(alphabet, n, i))
}

/// All subsets of `{1, ..., n}` in order of their bitmask value.
pub fn enumerate_subsets(n: usize) -> impl Iterator<Item = IndexSet> {
    assert!(n < MAX_INDEXED_LEN, "subset enumeration limited to n < 64");
    (0..(1u64 << n)).map(move |mask| IndexSet { bound: n, mask })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: usize, ps: &[usize]) -> IndexSet {
        IndexSet::new(n, ps.iter().copied()).unwrap()
    }

    #[test]
    fn restrict_examples() {
        let abc = Word::syms("abc");
        assert_eq!(abc.restrict(&set(3, &[1, 3])).unwrap(), Word::syms("ac"));
        assert_eq!(abc.restrict(&set(3, &[])).unwrap(), Word::empty());
        assert_eq!(Word::syms("abcd").restrict(&set(4, &[2, 3])).unwrap(), Word::syms("bc"));
    }

    #[test]
    fn restrict_rejects_wrong_bound() {
        let err = Word::syms("abc").restrict(&set(4, &[1])).unwrap_err();
        assert_eq!(err, WordError::BoundMismatch { expected: 4, found: 3 });
        assert_eq!(IndexSet::new(3, [4]).unwrap_err(), WordError::IndexOutOfRange { position: 4, bound: 3 });
        assert!(IndexSet::new(3, [0]).is_err());
    }

    #[test]
    fn power_examples() {
        assert_eq!(Word::syms("ab").power(0), Word::empty());
        assert_eq!(Word::syms("a").power(3), Word::syms("aaa"));
        assert_eq!(Word::empty().power(5), Word::empty());
    }

    #[test]
    fn splice_examples() {
        let abc = Word::syms("abc");
        assert_eq!(abc.splice(&set(3, &[1, 3]), &Word::syms("uu")).unwrap(), Word::syms("ubu"));
        assert_eq!(abc.splice(&set(3, &[]), &Word::empty()).unwrap(), abc);
        assert_eq!(
            Word::syms("abcd").splice(&set(4, &[2, 3]), &Word::syms("xy")).unwrap(),
            Word::syms("axyd")
        );
        assert_eq!(
            abc.splice(&set(3, &[1]), &Word::syms("xy")).unwrap_err(),
            WordError::LengthMismatch { expected: 1, found: 2 }
        );
    }

    #[test]
    fn enumerate_words_examples() {
        let ab = [Value::sym("a"), Value::sym("b")];
        let words: Vec<String> = enumerate_words(&ab, 2).map(|w| w.to_string()).collect();
        assert_eq!(words, ["aa", "ab", "ba", "bb"]);
        let a = [Value::sym("a")];
        assert_eq!(enumerate_words(&a, 0).collect::<Vec<_>>(), vec![Word::empty()]);
        let abc = [Value::sym("a"), Value::sym("b"), Value::sym("c")];
        let words: Vec<String> = enumerate_words(&abc, 1).map(|w| w.to_string()).collect();
        assert_eq!(words, ["a", "b", "c"]);
    }

    #[test]
    fn enumerate_subsets_examples() {
        assert_eq!(enumerate_subsets(0).collect::<Vec<_>>(), vec![IndexSet::empty(0).unwrap()]);
        let subsets: Vec<Vec<usize>> = enumerate_subsets(2).map(|k| k.positions()).collect();
        assert_eq!(subsets, vec![vec![], vec![1], vec![2], vec![1, 2]]);
        assert_eq!(enumerate_subsets(4).count(), 16);
    }

    #[test]
    fn complement_partitions_positions() {
        let k = set(5, &[2, 5]);
        assert_eq!(k.complement().positions(), vec![1, 3, 4]);
        assert_eq!(k.len() + k.complement().len(), 5);
        assert!(IndexSet::empty(0).unwrap().complement().is_empty());
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        prop::collection::vec(0u8..3, 0..8)
            .prop_map(|v| Word::from_letters(v.into_iter().map(|i| Value::Int(i as i64)).collect()))
    }

    proptest! {
        #[test]
        fn splice_of_restriction_is_identity(w in arb_word(), mask in any::<u64>()) {
            let k = IndexSet::from_mask(w.len(), mask & ((1u64 << w.len()) - 1)).unwrap();
            prop_assert_eq!(w.splice(&k, &w.restrict(&k).unwrap()).unwrap(), w);
        }

        #[test]
        fn splice_then_restrict(w in arb_word(), mask in any::<u64>(), fill in 0i64..3) {
            let k = IndexSet::from_mask(w.len(), mask & ((1u64 << w.len()) - 1)).unwrap();
            let r = Word::single(Value::Int(fill)).power(k.len());
            let spliced = w.splice(&k, &r).unwrap();
            prop_assert_eq!(spliced.restrict(&k).unwrap(), r);
            prop_assert_eq!(
                spliced.restrict(&k.complement()).unwrap(),
                w.restrict(&k.complement()).unwrap()
            );
        }

        #[test]
        fn powers_add(w in arb_word(), j in 0usize..4, k in 0usize..4) {
            prop_assert_eq!(w.power(j + k), w.power(j).concat(&w.power(k)));
            prop_assert_eq!(w.power(k).len(), k * w.len());
        }

        #[test]
        fn concat_is_associative(a in arb_word(), b in arb_word(), c in arb_word()) {
            prop_assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
            prop_assert_eq!(a.concat(&Word::empty()), a.clone());
            prop_assert_eq!(Word::empty().concat(&a), a);
        }

        #[test]
        fn enumeration_is_exhaustive_and_distinct(size in 1usize..4, n in 0usize..5) {
            let alphabet: Vec<Value> = (0..size as i64).map(Value::Int).collect();
            let words: std::collections::HashSet<Word> = enumerate_words(&alphabet, n).collect();
            prop_assert_eq!(words.len() as u64, word_count(size, n).unwrap());
        }
    }
}
