//! Letters and operation outputs.
//!
//! A single [`Value`] type serves as a letter of a finite alphabet, a real
//! scalar, an external codomain value (e.g. a length) and the empty word `ε`.
//! String-valued operations return [`Value::Word`].

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::words::Word;

#[derive(Clone, Debug)]
pub enum Value {
    /// The empty word, used as the value `F(ε)` of ε-standard operations.
    Eps,
    Sym(Arc<str>),
    Int(i64),
    Real(f64),
    Word(Word),
}

impl Value {
    pub fn sym(s: &str) -> Self {
        Value::Sym(Arc::from(s))
    }

    pub fn is_eps(&self) -> bool {
        matches!(self, Value::Eps)
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(x) => Some(*x),
            _ => None,
        }
    }

    /// Equality up to an absolute tolerance on reals; exact otherwise.
    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Real(a), Value::Real(b)) => a == b || (a - b).abs() <= tol,
            (Value::Word(a), Value::Word(b)) => {
                a.len() == b.len()
                    && a.letters()
                        .iter()
                        .zip(b.letters())
                        .all(|(x, y)| x.approx_eq(y, tol))
            }
            _ => self == other,
        }
    }

    /// `|a - b|` when both sides are real.
    pub fn residual(&self, other: &Value) -> Option<f64> {
        match (self, other) {
            (Value::Real(a), Value::Real(b)) => Some((a - b).abs()),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Eps => 0,
            Value::Sym(_) => 1,
            Value::Int(_) => 2,
            Value::Real(_) => 3,
            Value::Word(_) => 4,
        }
    }

    /// Converts a JSON scalar/array into a value: `null` is `ε`, integers
    /// become [`Value::Int`], other numbers [`Value::Real`], arrays words.
    pub fn from_json(v: &serde_json::Value) -> Result<Value, String> {
        match v {
            serde_json::Value::Null => Ok(Value::Eps),
            serde_json::Value::String(s) => Ok(Value::sym(s)),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Value::Int(i))
                } else if let Some(x) = n.as_f64() {
                    Ok(Value::Real(x))
                } else {
                    Err(format!("unrepresentable number {n}"))
                }
            }
            serde_json::Value::Array(items) => {
                let letters = items.iter().map(Value::from_json).collect::<Result<Vec<_>, _>>()?;
                Ok(Value::Word(Word::from_letters(letters)))
            }
            serde_json::Value::Bool(_) => Err("booleans are not valid values".into()),
            serde_json::Value::Object(_) => Err("objects are not valid values".into()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Eps => serde_json::Value::Null,
            Value::Sym(s) => serde_json::Value::String(s.to_string()),
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Real(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or_else(|| serde_json::Value::String(x.to_string())),
            Value::Word(w) => serde_json::Value::Array(w.letters().iter().map(Value::to_json).collect()),
        }
    }
}

fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else if x.is_nan() {
        f64::NAN.to_bits()
    } else {
        x.to_bits()
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Eps, Value::Eps) => true,
            (Value::Sym(a), Value::Sym(b)) => a == b,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Real(a), Value::Real(b)) => canonical_bits(*a) == canonical_bits(*b),
            (Value::Word(a), Value::Word(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Eps => {}
            Value::Sym(s) => s.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Real(x) => canonical_bits(*x).hash(state),
            Value::Word(w) => w.hash(state),
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Sym(a), Value::Sym(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Real(a), Value::Real(b)) => a.total_cmp(b),
            (Value::Word(a), Value::Word(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Eps => write!(f, "ε"),
            Value::Sym(s) => write!(f, "{s}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) => write!(f, "{x}"),
            Value::Word(w) => write!(f, "[{w}]"),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::sym(s)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(deserializer)?;
        Value::from_json(&raw).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_is_zero() {
        assert_eq!(Value::Real(-0.0), Value::Real(0.0));
    }

    #[test]
    fn json_round_trip_kinds() {
        let v: Value = serde_json::from_str("[\"a\", 2, 2.5, null]").unwrap();
        let Value::Word(w) = &v else { panic!("expected word") };
        assert_eq!(w.letters()[0], Value::sym("a"));
        assert_eq!(w.letters()[1], Value::Int(2));
        assert_eq!(w.letters()[2], Value::Real(2.5));
        assert_eq!(w.letters()[3], Value::Eps);
        let back: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn real_two_stays_real() {
        let s = serde_json::to_string(&Value::Real(2.0)).unwrap();
        assert_eq!(serde_json::from_str::<Value>(&s).unwrap(), Value::Real(2.0));
    }

    #[test]
    fn tolerance_only_applies_to_reals() {
        assert!(Value::Real(1.0).approx_eq(&Value::Real(1.0 + 1e-12), 1e-9));
        assert!(!Value::Real(1.0).approx_eq(&Value::Real(1.1), 1e-9));
        assert!(!Value::Int(1).approx_eq(&Value::Real(1.0), 1.0));
    }
}
