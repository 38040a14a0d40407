//! Seeded finite table operations for cross-checking the law catalog.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::domain::Alphabet;
use crate::mix_seed;
use crate::operations::{builtin, default_table_arity, VariadicOp};
use crate::value::Value;
use crate::words::{enumerate_words, Word};

/// Letters `a, b, c, ...`.
pub fn letters(size: usize) -> Alphabet {
    assert!((1..=26).contains(&size), "alphabet size must be in 1..=26");
    Alphabet::syms(&"abcdefghijklmnopqrstuvwxyz"[..size])
}

fn rng_for(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, &[tag]))
}

fn pick(rng: &mut ChaCha8Rng, from: &[Value]) -> Value {
    from.choose(rng).expect("nonempty choice").clone()
}

/// Tables with independent uniform values in the alphabet.
pub fn uniform_table(alphabet: &Alphabet, max_arity: usize, seed: u64) -> VariadicOp {
    let mut rng = rng_for(seed, 1);
    VariadicOp::tabulate("uniform", alphabet.clone(), max_arity, None, |_| pick(&mut rng, alphabet.letters()))
        .expect("uniform tables are well formed")
}

fn sorted(w: &Word) -> Word {
    let mut l = w.letters().to_vec();
    l.sort();
    Word::from_letters(l)
}

/// Random tables depending only on the multiset of letters.
pub fn symmetric_table(alphabet: &Alphabet, max_arity: usize, seed: u64) -> VariadicOp {
    let mut rng = rng_for(seed, 2);
    let mut by_multiset: HashMap<Word, Value> = HashMap::new();
    VariadicOp::tabulate("symmetric", alphabet.clone(), max_arity, None, |w| {
        by_multiset.entry(sorted(w)).or_insert_with(|| pick(&mut rng, alphabet.letters())).clone()
    })
    .expect("symmetric tables are well formed")
}

/// Random tables with `F(x^n) = x`, optionally symmetric.
pub fn idempotent_table(alphabet: &Alphabet, max_arity: usize, seed: u64, symmetric: bool) -> VariadicOp {
    let mut rng = rng_for(seed, 3);
    let mut by_multiset: HashMap<Word, Value> = HashMap::new();
    VariadicOp::tabulate("idempotent", alphabet.clone(), max_arity, None, |w| {
        let first = &w.letters()[0];
        if w.letters().iter().all(|l| l == first) {
            return first.clone();
        }
        if symmetric {
            by_multiset.entry(sorted(w)).or_insert_with(|| pick(&mut rng, alphabet.letters())).clone()
        } else {
            pick(&mut rng, alphabet.letters())
        }
    })
    .expect("idempotent tables are well formed")
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn word_index(alphabet: &Alphabet, w: &Word) -> usize {
    w.letters().iter().fold(0, |acc, l| acc * alphabet.len() + alphabet.index_of(l).expect("letter"))
}

/// A strongly B-associative ε-standard operation built arity by arity:
/// `F_1` is a random idempotent map and each `F_{k+1}` is constant on the
/// classes generated by `xyz ~ F_k(xz)^{|x|} y F_k(xz)^{|z|}` (`|y| = 1`),
/// with `F_{k+1}(c^{k+1}) = c` on the values it takes. With `idempotent`,
/// every diagonal is the identity where the classes allow it.
pub fn planted_strong(alphabet: &Alphabet, max_arity: usize, seed: u64, idempotent: bool) -> VariadicOp {
    let mut rng = rng_for(seed, 4);
    let letters = alphabet.letters();
    let m = letters.len();
    // F_1: identity on a random image set S, elsewhere into S.
    let f1: Vec<Value> = if idempotent {
        letters.to_vec()
    } else {
        let mut image: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.6)).collect();
        if image.is_empty() {
            image.push(rng.gen_range(0..m));
        }
        (0..m)
            .map(|i| letters[if image.contains(&i) { i } else { *image.choose(&mut rng).expect("nonempty") }].clone())
            .collect()
    };
    let mut tables: Vec<Vec<Value>> = vec![f1];
    for k in 1..max_arity {
        let n = k + 1;
        let words: Vec<Word> = enumerate_words(letters, n).collect();
        let prev = &tables[k - 1];
        let mut uf = UnionFind::new(words.len());
        for (i, w) in words.iter().enumerate() {
            for pos in 0..n {
                let xz = w.without(pos + 1);
                let v = prev[word_index(alphabet, &xz)].clone();
                let mut rewritten = Word::single(v.clone()).power(pos);
                rewritten.push(w.letters()[pos].clone());
                rewritten.extend_from(&Word::single(v).power(n - 1 - pos));
                uf.union(i, word_index(alphabet, &rewritten));
            }
        }
        let constant_index = |c: usize| (0..n).fold(0, |acc, _| acc * m + c);
        // Letters whose constant word can carry its own value.
        let mut class_value: HashMap<usize, usize> = HashMap::new();
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut rng);
        for &c in &order {
            let root = uf.find(constant_index(c));
            if !class_value.contains_key(&root) && (idempotent || rng.gen_bool(0.7)) {
                class_value.insert(root, c);
            }
        }
        for &c in &order {
            let root = uf.find(constant_index(c));
            class_value.entry(root).or_insert(c);
        }
        let fixed: Vec<usize> = {
            let mut f: Vec<usize> = (0..m).filter(|&c| class_value.get(&uf.find(constant_index(c))) == Some(&c)).collect();
            f.sort();
            f
        };
        let mut table = Vec::with_capacity(words.len());
        for i in 0..words.len() {
            let root = uf.find(i);
            let c = *class_value.entry(root).or_insert_with(|| *fixed.choose(&mut rng).expect("a fixed letter exists"));
            table.push(letters[c].clone());
        }
        tables.push(table);
    }
    VariadicOp::from_tables("planted-strong", alphabet.clone(), tables, None).expect("planted tables are well formed")
}

/// `H_n = g_n ∘ F_n` into integers; `injective` keeps each `g_n` one-to-one.
pub fn external_composition(base: &VariadicOp, seed: u64, injective: bool) -> VariadicOp {
    let alphabet = base.alphabet().expect("finite base").clone();
    let mut rng = rng_for(seed, 5);
    let m = alphabet.len() as i64;
    let salts: Vec<i64> = (0..=base.max_arity().unwrap_or(1)).map(|_| rng.gen_range(0..100)).collect();
    VariadicOp::tabulate("external", alphabet.clone(), base.max_arity().unwrap_or(1), None, |w| {
        let v = base.evaluate(w).expect("base is total");
        let i = alphabet.index_of(&v).expect("base values are letters") as i64;
        let n = w.len() as i64;
        let code = if injective { i } else { i.min(m - 2).max(0) };
        Value::Int(salts[w.len()] * 10 + n * 1000 + code)
    })
    .expect("external tables are well formed")
}

/// Tables with values in `{0, 1, 2}` (disjoint from the letters).
pub fn external_random(alphabet: &Alphabet, max_arity: usize, seed: u64) -> VariadicOp {
    let mut rng = rng_for(seed, 6);
    let values = [Value::Int(0), Value::Int(1), Value::Int(2)];
    VariadicOp::tabulate("external-random", alphabet.clone(), max_arity, None, |_| pick(&mut rng, &values))
        .expect("external tables are well formed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorpusKind {
    Uniform,
    Symmetric,
    PlantedStrong,
    PlantedIdempotentStrong,
    Idempotent,
    SymmetricIdempotent,
    ExternalInjective,
    ExternalCollapsing,
    ExternalRandom,
    Builtin,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub kind: CorpusKind,
    pub op: VariadicOp,
}

/// `count` seeded table operations over `size` letters up to `max_arity`.
/// The mix cycles through every generator kind, so any prefix is varied.
pub fn random_corpus(seed: u64, count: usize, size: usize, max_arity: usize) -> Vec<CorpusEntry> {
    use CorpusKind::*;
    let alphabet = letters(size);
    let cycle = [
        Uniform,
        PlantedStrong,
        Symmetric,
        PlantedIdempotentStrong,
        Idempotent,
        ExternalInjective,
        Uniform,
        PlantedStrong,
        SymmetricIdempotent,
        ExternalRandom,
        PlantedIdempotentStrong,
        ExternalCollapsing,
    ];
    (0..count)
        .map(|i| {
            let kind = cycle[i % cycle.len()];
            let s = mix_seed(seed, &[i as u64]);
            let op = match kind {
                Uniform => uniform_table(&alphabet, max_arity, s),
                Symmetric => symmetric_table(&alphabet, max_arity, s),
                PlantedStrong => planted_strong(&alphabet, max_arity, s, false),
                PlantedIdempotentStrong => planted_strong(&alphabet, max_arity, s, true),
                Idempotent => idempotent_table(&alphabet, max_arity, s, false),
                SymmetricIdempotent => idempotent_table(&alphabet, max_arity, s, true),
                ExternalInjective => external_composition(&planted_strong(&alphabet, max_arity, s, false), s, true),
                ExternalCollapsing => external_composition(&uniform_table(&alphabet, max_arity, s), s, false),
                ExternalRandom => external_random(&alphabet, max_arity, s),
                Builtin => unreachable!(),
            };
            let id = format!("{kind:?}-{i:03}");
            CorpusEntry { op: op.with_name(id.clone()), id, kind }
        })
        .collect()
}

/// Names accepted by [`named_table`].
pub const NAMED_TABLES: &[&str] = &[
    "first-projection",
    "last-projection",
    "min",
    "max",
    "length-like",
    "identity-lift",
    "sum-mod-2",
    "random",
    "non-preassoc-random",
];

/// Desk-scale tables for the builtins (`|X| = 2`, arity 4) and two seeded
/// random tables.
pub fn named_table(name: &str) -> Option<VariadicOp> {
    let ab = letters(2);
    let arity = default_table_arity(2);
    let alpha = json!({"alphabet": ["a", "b"]});
    let params = alpha.as_object().expect("object");
    let op = match name {
        "first-projection" | "last-projection" | "min" | "max" | "identity-lift" => {
            builtin(name, params).ok()?.to_table(&ab, arity).ok()?
        }
        "length-like" => builtin("length", params).ok()?.to_table(&ab, arity).ok()?,
        "sum-mod-2" => {
            let p = json!({"modulus": 2});
            builtin("sum-mod", p.as_object().expect("object")).ok()?.to_table(&Alphabet::integers(2), arity).ok()?
        }
        "random" => uniform_table(&ab, arity, 42),
        "non-preassoc-random" => uniform_table(&ab, arity, 7),
        _ => return None,
    };
    Some(op.with_name(name))
}

/// Every named builtin table as a corpus entry.
pub fn builtin_tables() -> Vec<CorpusEntry> {
    NAMED_TABLES
        .iter()
        .filter(|n| !n.contains("random"))
        .map(|n| CorpusEntry { id: n.to_string(), kind: CorpusKind::Builtin, op: named_table(n).expect("named table") })
        .collect()
}

/// The acceptance corpus: 200 seeded operations over `{a, b}` with arity at
/// most 4, followed by the builtin tables.
pub fn standard_corpus(seed: u64) -> Vec<CorpusEntry> {
    let mut c = random_corpus(seed, 200, 2, 4);
    c.extend(builtin_tables());
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible() {
        let a = random_corpus(9, 24, 2, 3);
        let b = random_corpus(9, 24, 2, 3);
        for (x, y) in a.iter().zip(&b) {
            for n in 1..=3 {
                assert_eq!(x.op.table(n), y.op.table(n));
            }
        }
    }

    #[test]
    fn planted_ops_are_epsilon_standard_and_closed() {
        for s in 0..20 {
            let op = planted_strong(&letters(3), 3, s, s % 2 == 0);
            assert!(op.codomain().is_domain());
            assert!(op.is_epsilon_standard());
        }
    }

    #[test]
    fn planted_idempotent_has_identity_diagonals_for_two_letters() {
        for s in 0..20 {
            let op = planted_strong(&letters(2), 4, s, true);
            for n in 1..=4 {
                for l in letters(2).letters() {
                    assert_eq!(&op.evaluate(&Word::single(l.clone()).power(n)).unwrap(), l);
                }
            }
        }
    }

    #[test]
    fn named_tables_resolve() {
        for n in NAMED_TABLES {
            let op = named_table(n).unwrap();
            assert!(op.is_table(), "{n}");
        }
        assert!(named_table("nope").is_none());
    }
}
