//! JSON operation specs.
//!
//! ```json
//! {"kind": "table", "alphabet": ["a", "b"],
//!  "tables": {"1": {"a": "a", "b": "b"}, "2": {"aa": "a", "ab": "a", "ba": "b", "bb": "b"}},
//!  "epsilon": null}
//! {"kind": "builtin", "name": "geometric-mean", "params": {"interval": [1, 2]}}
//! ```
//!
//! Table keys spell words: letters are concatenated when every letter is a
//! one-character symbol and comma-separated otherwise (`"0,1,1"`). An absent
//! `epsilon` means `ε` for closed tables and "undefined" otherwise; `null`
//! always means `ε`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use super::builtins::{builtin, builtin_spec, Params};
use super::{OpError, VariadicOp};
use crate::domain::Alphabet;
use crate::value::Value;
use crate::words::{enumerate_words, Word};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OpSpec {
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        alphabet: Vec<Value>,
        tables: BTreeMap<String, BTreeMap<String, Value>>,
        #[serde(default, deserialize_with = "present", skip_serializing_if = "Option::is_none")]
        epsilon: Option<Value>,
    },
    Builtin {
        name: String,
        #[serde(default)]
        params: Params,
    },
}

/// Distinguishes `"epsilon": null` (ε) from a missing field.
fn present<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Value>, D::Error> {
    Value::deserialize(d).map(Some)
}

fn letter_key(l: &Value) -> String {
    match l {
        Value::Sym(s) => s.to_string(),
        other => other.to_string(),
    }
}

/// Parses a table key into a word over `alphabet`.
pub fn parse_word_key(key: &str, alphabet: &Alphabet) -> Result<Word, OpError> {
    if key.is_empty() {
        return Ok(Word::empty());
    }
    let lookup = |tok: &str| -> Result<Value, OpError> {
        alphabet
            .letters()
            .iter()
            .find(|l| letter_key(l) == tok)
            .cloned()
            .ok_or_else(|| OpError::Spec(format!("key `{key}`: `{tok}` is not a letter of the alphabet")))
    };
    let letters = if alphabet.is_compact() && !key.contains(',') {
        key.chars().map(|c| lookup(&c.to_string())).collect::<Result<Vec<_>, _>>()?
    } else {
        key.split(',').map(|t| lookup(t.trim())).collect::<Result<Vec<_>, _>>()?
    };
    Ok(Word::from_letters(letters))
}

fn word_key(w: &Word, alphabet: &Alphabet) -> String {
    let parts: Vec<String> = w.letters().iter().map(letter_key).collect();
    if alphabet.is_compact() {
        parts.concat()
    } else {
        parts.join(",")
    }
}

impl OpSpec {
    pub fn build(&self) -> Result<VariadicOp, OpError> {
        match self {
            OpSpec::Builtin { name, params } => builtin(name, params),
            OpSpec::Table { name, alphabet, tables, epsilon } => {
                let alphabet = Alphabet::new(alphabet.clone())?;
                let mut arities = Vec::with_capacity(tables.len());
                for (k, entries) in tables {
                    let n: usize = k.parse().map_err(|_| OpError::Spec(format!("arity key `{k}` is not a number")))?;
                    arities.push((n, entries));
                }
                arities.sort_by_key(|(n, _)| *n);
                let mut out = Vec::with_capacity(arities.len());
                for (i, (n, entries)) in arities.into_iter().enumerate() {
                    if n != i + 1 {
                        return Err(OpError::Spec(format!("tables must cover arities 1..N without gaps; missing {}", i + 1)));
                    }
                    let mut dense: BTreeMap<Word, Value> = BTreeMap::new();
                    for (key, v) in entries {
                        let w = parse_word_key(key, &alphabet)?;
                        if w.len() != n {
                            return Err(OpError::Spec(format!("key `{key}` has length {} in the arity {n} table", w.len())));
                        }
                        if dense.insert(w, v.clone()).is_some() {
                            return Err(OpError::Spec(format!("key `{key}` is repeated in the arity {n} table")));
                        }
                    }
                    let mut t = Vec::with_capacity(dense.len());
                    for w in enumerate_words(alphabet.letters(), n) {
                        let v = dense.remove(&w).ok_or_else(|| {
                            OpError::Spec(format!("arity {n} table misses word {}", word_key(&w, &alphabet)))
                        })?;
                        t.push(v);
                    }
                    out.push(t);
                }
                if out.is_empty() {
                    return Err(OpError::Spec("a table op needs at least the arity 1 table".into()));
                }
                VariadicOp::from_tables(name.clone().unwrap_or_else(|| "table".into()), alphabet, out, epsilon.clone())
            }
        }
    }

    /// Spec reproducing `op`: tables verbatim, builtins by family and params.
    pub fn from_op(op: &VariadicOp) -> Result<OpSpec, OpError> {
        if let Some(alphabet) = op.alphabet().filter(|_| op.is_table()) {
            let mut tables = BTreeMap::new();
            let max = op.max_arity().unwrap_or(0);
            for n in 1..=max {
                let values = op.table(n).expect("table arity");
                let entries = enumerate_words(alphabet.letters(), n)
                    .zip(values)
                    .map(|(w, v)| (word_key(&w, alphabet), v.clone()))
                    .collect();
                tables.insert(n.to_string(), entries);
            }
            return Ok(OpSpec::Table {
                name: Some(op.name().to_string()),
                alphabet: alphabet.letters().to_vec(),
                tables,
                epsilon: op.epsilon_value().cloned(),
            });
        }
        let spec = builtin_spec(op).ok_or_else(|| OpError::Spec(format!("{} has no spec form", op.name())))?;
        serde_json::from_value(spec).map_err(|e| OpError::Spec(e.to_string()))
    }
}

/// Reads and builds an operation spec file.
pub fn load_op_spec(path: &Path) -> Result<VariadicOp, OpError> {
    let text = std::fs::read_to_string(path).map_err(|e| OpError::Spec(format!("{}: {e}", path.display())))?;
    let spec: OpSpec = serde_json::from_str(&text).map_err(|e| OpError::Spec(format!("{}: {e}", path.display())))?;
    spec.build().map_err(|e| match e {
        OpError::Spec(m) => OpError::Spec(format!("{}: {m}", path.display())),
        other => other,
    })
}
