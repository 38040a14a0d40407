//! Variadic operations `F: X* → Y`.
//!
//! An operation is either backed by explicit per-arity tables over a finite
//! alphabet or by a parametric evaluation closure (builtin families and the
//! composition constructors). Evaluation is pure and `Send + Sync`.

mod builtins;
mod spec;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use builtins::{builtin, default_table_arity, Catalog, Family, FamilyBuilder, Params};
pub use spec::{load_op_spec, parse_word_key, OpSpec};

use crate::domain::{Alphabet, Codomain, Domain, DomainError};
use crate::value::Value;
use crate::words::{enumerate_words, word_count, Word};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error("word of length {len} exceeds the supported arity {max}")]
    ArityOverflow { len: usize, max: usize },
    #[error("letter {0} is outside the domain")]
    OutOfDomain(Value),
    #[error("F(ε) is undefined for this operation")]
    EpsilonUndefined,
    #[error("unknown operation family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters for `{family}`: {reason}")]
    InvalidParams { family: String, reason: String },
    #[error("value {value} is outside the codomain ({context})")]
    OutOfCodomain { value: Value, context: String },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("unary map is undefined at {0}")]
    MapUndefined(Value),
    #[error("invalid operation spec: {0}")]
    Spec(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Evaluation closure over the letters of a nonempty word.
pub type LetterFn = Arc<dyn Fn(&[Value]) -> Result<Value, OpError> + Send + Sync>;
/// A unary map on values.
pub type UnaryMap = Arc<dyn Fn(&Value) -> Result<Value, OpError> + Send + Sync>;
/// A family of unary maps indexed by arity, `(n, y) ↦ g_n(y)`.
pub type ArityMap = Arc<dyn Fn(usize, &Value) -> Result<Value, OpError> + Send + Sync>;

#[derive(Clone)]
enum Backing {
    /// `tables[n - 1]` holds `F_n` in lexicographic word order.
    Table(Arc<Vec<Vec<Value>>>),
    Parametric { family: String, params: serde_json::Value, eval: LetterFn },
}

#[derive(Clone)]
pub struct VariadicOp {
    name: String,
    domain: Domain,
    codomain: Codomain,
    max_arity: Option<usize>,
    epsilon_standard: bool,
    epsilon: Option<Value>,
    backing: Backing,
}

impl fmt::Debug for VariadicOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VariadicOp")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("codomain", &self.codomain)
            .field("max_arity", &self.max_arity)
            .field("epsilon", &self.epsilon)
            .field("table", &self.is_table())
            .finish()
    }
}

impl VariadicOp {
    /// Table-backed operation. `tables[n - 1]` lists `F_n` over all
    /// `|alphabet|^n` words in lexicographic order. The codomain is inferred:
    /// `X ∪ {ε}` when every value (and `F(ε)`) is a letter or `ε`.
    pub fn from_tables(
        name: impl Into<String>,
        alphabet: Alphabet,
        tables: Vec<Vec<Value>>,
        epsilon: Option<Value>,
    ) -> Result<Self, OpError> {
        for (i, t) in tables.iter().enumerate() {
            let expected = word_count(alphabet.len(), i + 1)
                .ok_or_else(|| OpError::Spec(format!("arity {} table is too large", i + 1)))?;
            if t.len() as u64 != expected {
                return Err(OpError::Spec(format!(
                    "arity {} table has {} entries, expected {expected}",
                    i + 1,
                    t.len()
                )));
            }
        }
        let in_domain = |v: &Value| v.is_eps() || alphabet.contains(v);
        let closed = tables.iter().flatten().all(in_domain) && epsilon.as_ref().map_or(true, in_domain);
        let codomain = if closed { Codomain::DomainWithEpsilon } else { Codomain::External("values".into()) };
        let epsilon = match (epsilon, &codomain) {
            (None, Codomain::DomainWithEpsilon) => Some(Value::Eps),
            (e, _) => e,
        };
        let epsilon_standard =
            epsilon.as_ref().is_some_and(Value::is_eps) && !tables.iter().flatten().any(Value::is_eps);
        let max_arity = Some(tables.len());
        Ok(VariadicOp {
            name: name.into(),
            domain: Domain::Finite(alphabet),
            codomain,
            max_arity,
            epsilon_standard,
            epsilon,
            backing: Backing::Table(Arc::new(tables)),
        })
    }

    /// Tabulates `f` over every word of length `1..=max_arity`.
    pub fn tabulate(
        name: impl Into<String>,
        alphabet: Alphabet,
        max_arity: usize,
        epsilon: Option<Value>,
        mut f: impl FnMut(&Word) -> Value,
    ) -> Result<Self, OpError> {
        let tables = (1..=max_arity)
            .map(|n| enumerate_words(alphabet.letters(), n).map(|w| f(&w)).collect())
            .collect();
        Self::from_tables(name, alphabet, tables, epsilon)
    }

    /// Parametric operation evaluated by `eval` on nonempty words whose
    /// letters have already been checked against `domain`.
    #[allow(clippy::too_many_arguments)]
    pub fn parametric(
        name: impl Into<String>,
        family: impl Into<String>,
        params: serde_json::Value,
        domain: Domain,
        codomain: Codomain,
        max_arity: Option<usize>,
        epsilon: Option<Value>,
        eval: LetterFn,
    ) -> Self {
        let epsilon_standard = codomain.is_domain() && epsilon.as_ref().is_some_and(Value::is_eps);
        VariadicOp {
            name: name.into(),
            domain,
            codomain,
            max_arity,
            epsilon_standard,
            epsilon,
            backing: Backing::Parametric { family: family.into(), params, eval },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn alphabet(&self) -> Option<&Alphabet> {
        self.domain.alphabet()
    }

    pub fn codomain(&self) -> &Codomain {
        &self.codomain
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.max_arity
    }

    pub fn with_max_arity(mut self, max_arity: Option<usize>) -> Self {
        if let Backing::Table(t) = &self.backing {
            let cap = t.len();
            self.max_arity = Some(max_arity.map_or(cap, |m| m.min(cap)));
        } else {
            self.max_arity = max_arity;
        }
        self
    }

    /// `F(ε)`, or `None` when it is left undefined.
    pub fn epsilon_value(&self) -> Option<&Value> {
        self.epsilon.as_ref()
    }

    pub fn with_epsilon(mut self, epsilon: Option<Value>) -> Self {
        self.epsilon_standard = self.epsilon_standard && epsilon.as_ref().is_some_and(Value::is_eps);
        self.epsilon = epsilon;
        self
    }

    /// The declared ε-standard flag. [`crate::properties::PropertyId::EpsilonStandard`]
    /// tests the actual behaviour.
    pub fn is_epsilon_standard(&self) -> bool {
        self.epsilon_standard
    }

    pub fn is_table(&self) -> bool {
        matches!(self.backing, Backing::Table(_))
    }

    pub fn family(&self) -> Option<(&str, &serde_json::Value)> {
        match &self.backing {
            Backing::Parametric { family, params, .. } => Some((family, params)),
            Backing::Table(_) => None,
        }
    }

    /// The stored `F_n` table, for table-backed operations.
    pub fn table(&self, n: usize) -> Option<&[Value]> {
        match &self.backing {
            Backing::Table(t) if n >= 1 => t.get(n - 1).map(Vec::as_slice),
            _ => None,
        }
    }

    pub fn evaluate(&self, x: &Word) -> Result<Value, OpError> {
        if x.is_empty() {
            return self.epsilon.clone().ok_or(OpError::EpsilonUndefined);
        }
        if let Some(max) = self.max_arity {
            if x.len() > max {
                return Err(OpError::ArityOverflow { len: x.len(), max });
            }
        }
        match &self.backing {
            Backing::Table(tables) => {
                let alphabet = self.alphabet().expect("tables are over finite alphabets");
                let base = alphabet.len();
                let mut index = 0usize;
                for l in x.letters() {
                    let i = alphabet.index_of(l).ok_or_else(|| OpError::OutOfDomain(l.clone()))?;
                    index = index * base + i;
                }
                Ok(tables[x.len() - 1][index].clone())
            }
            Backing::Parametric { eval, .. } => {
                if let Some(l) = x.letters().iter().find(|l| !self.domain.contains(l)) {
                    return Err(OpError::OutOfDomain(l.clone()));
                }
                eval(x.letters())
            }
        }
    }

    /// Convenience for real-valued operations on real words.
    pub fn evaluate_reals(&self, xs: &[f64]) -> Result<f64, OpError> {
        match self.evaluate(&Word::reals(xs))? {
            Value::Real(v) => Ok(v),
            other => Err(OpError::Eval(format!("expected a real value, got {other}"))),
        }
    }

    /// Distinct values of `F_n` in order of first appearance over the
    /// lexicographic enumeration. Finite domains only.
    pub fn range(&self, n: usize) -> Result<Vec<Value>, OpError> {
        let alphabet = self
            .alphabet()
            .ok_or_else(|| OpError::DomainMismatch("range enumeration needs a finite alphabet".into()))?;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for w in enumerate_words(alphabet.letters(), n) {
            let v = self.evaluate(&w)?;
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Materializes the operation as tables over `alphabet` for arities
    /// `1..=max_arity`. Fails when a value escapes a `X ∪ {ε}` codomain.
    pub fn to_table(&self, alphabet: &Alphabet, max_arity: usize) -> Result<VariadicOp, OpError> {
        let mut tables = Vec::with_capacity(max_arity);
        for n in 1..=max_arity {
            let mut t = Vec::new();
            for w in enumerate_words(alphabet.letters(), n) {
                let v = self.evaluate(&w)?;
                if self.codomain.is_domain() && !v.is_eps() && !alphabet.contains(&v) {
                    return Err(OpError::OutOfCodomain {
                        value: v,
                        context: format!("{} is not closed over the alphabet at {w}", self.name),
                    });
                }
                t.push(v);
            }
            tables.push(t);
        }
        let mut op = VariadicOp::from_tables(self.name.clone(), alphabet.clone(), tables, self.epsilon.clone())?;
        if let Codomain::External(desc) = &self.codomain {
            op.codomain = Codomain::External(desc.clone());
        }
        Ok(op)
    }
}

/// `H_n(x_1…x_n) = F_n(g(x_1)…g(x_n))` over the new letter domain
/// `new_domain`; `H(ε) = F(ε)`.
pub fn right_compose(f: &VariadicOp, g: UnaryMap, new_domain: Domain) -> Result<VariadicOp, OpError> {
    let probes: Vec<Value> = match &new_domain {
        Domain::Finite(a) => a.letters().to_vec(),
        Domain::Real(i) => {
            let (lo, hi) = (i.sample_lo().max(-1e6), i.sample_hi().min(1e6));
            (0..=64).map(|k| Value::Real(lo + (hi - lo) * k as f64 / 64.0)).collect()
        }
    };
    for x in &probes {
        let y = g(x)?;
        if !f.domain.contains(&y) {
            return Err(OpError::DomainMismatch(format!("g({x}) = {y} lies outside the domain of {}", f.name)));
        }
    }
    let inner = f.clone();
    let eval: LetterFn = Arc::new(move |letters: &[Value]| {
        let mapped = letters.iter().map(|l| g(l)).collect::<Result<Vec<_>, _>>()?;
        inner.evaluate(&Word::from_letters(mapped))
    });
    let mut op = VariadicOp::parametric(
        format!("right_compose({})", f.name),
        "right-compose",
        serde_json::Value::Null,
        new_domain,
        f.codomain.clone(),
        f.max_arity,
        f.epsilon.clone(),
        eval,
    );
    if f.codomain.is_domain() {
        // Values of F live in X, not X'.
        op.codomain = Codomain::External(format!("values of {}", f.name));
        op.epsilon_standard = false;
    }
    Ok(op)
}

/// `H_n = g_n ∘ F_n` for every `n ≥ 1`, with values in `codomain`.
/// `H(ε)` is `ε` when `F(ε) = ε`, otherwise `g_0(F(ε))`.
pub fn left_compose(f: &VariadicOp, g: ArityMap, codomain: Codomain) -> VariadicOp {
    let epsilon = match f.epsilon.as_ref() {
        Some(Value::Eps) => Some(Value::Eps),
        Some(e) => g(0, e).ok(),
        None => None,
    };
    let inner = f.clone();
    let g_eval = g.clone();
    let eval: LetterFn = Arc::new(move |letters: &[Value]| {
        let v = inner.evaluate(&Word::from_letters(letters.to_vec()))?;
        g_eval(letters.len(), &v)
    });
    VariadicOp::parametric(
        format!("left_compose({})", f.name),
        "left-compose",
        serde_json::Value::Null,
        f.domain.clone(),
        codomain,
        f.max_arity,
        epsilon,
        eval,
    )
}

/// Two distinct values sent to the same image.
#[derive(Debug, Clone, PartialEq)]
pub struct Collision {
    pub arity: usize,
    pub first: Value,
    pub second: Value,
    pub image: Value,
}

/// First pair of distinct `values` that `g` identifies, if any.
pub fn injective_on(
    g: &dyn Fn(&Value) -> Result<Value, OpError>,
    values: &[Value],
) -> Result<Option<(Value, Value, Value)>, OpError> {
    let mut images: Vec<(Value, Value)> = Vec::with_capacity(values.len());
    for v in values {
        let image = g(v)?;
        if let Some((prev, _)) = images.iter().find(|(p, im)| *im == image && p != v) {
            return Ok(Some((prev.clone(), v.clone(), image)));
        }
        images.push((v.clone(), image));
    }
    Ok(None)
}

/// Checks that each `g_n` is one-to-one on `ran(F_n)`, `n = 1..=max_arity`.
/// Requires a finite domain and bounded arity.
pub fn left_injectivity(f: &VariadicOp, g: &ArityMap, max_arity: usize) -> Result<Option<Collision>, OpError> {
    for n in 1..=max_arity {
        let range = f.range(n)?;
        if let Some((first, second, image)) = injective_on(&|v| g(n, v), &range)? {
            return Ok(Some(Collision { arity: n, first, second, image }));
        }
    }
    Ok(None)
}

/// `G_k = F_k` for `k ≤ n` and `G_k = c_k` for `k > n`.
pub fn truncate_constant(
    f: &VariadicOp,
    n: usize,
    constants: Arc<dyn Fn(usize) -> Value + Send + Sync>,
) -> Result<VariadicOp, OpError> {
    if n == 0 {
        return Err(OpError::InvalidParams { family: "truncate".into(), reason: "n must be positive".into() });
    }
    let admissible = {
        let domain = f.domain.clone();
        let codomain = f.codomain.clone();
        move |v: &Value| !codomain.is_domain() || v.is_eps() || domain.contains(v)
    };
    if let Some(max) = f.max_arity {
        for k in n + 1..=max {
            let c = constants(k);
            if !admissible(&c) {
                return Err(OpError::OutOfCodomain { value: c, context: format!("constant c_{k}") });
            }
        }
    }
    let inner = f.clone();
    let eval: LetterFn = Arc::new(move |letters: &[Value]| {
        if letters.len() <= n {
            inner.evaluate(&Word::from_letters(letters.to_vec()))
        } else {
            let c = constants(letters.len());
            if admissible(&c) {
                Ok(c)
            } else {
                Err(OpError::OutOfCodomain { value: c, context: format!("constant c_{}", letters.len()) })
            }
        }
    });
    let mut op = VariadicOp::parametric(
        format!("truncate({}, {n})", f.name),
        "truncate-constant",
        serde_json::Value::Null,
        f.domain.clone(),
        f.codomain.clone(),
        f.max_arity,
        f.epsilon.clone(),
        eval,
    );
    op.epsilon_standard = false;
    Ok(op)
}

/// The diagonal section `δ_{F_n}(x) = F_n(x^n)`.
#[derive(Clone, Debug)]
pub struct DiagonalSection {
    op: VariadicOp,
    arity: usize,
}

impl DiagonalSection {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn apply(&self, x: &Value) -> Result<Value, OpError> {
        self.op.evaluate(&Word::single(x.clone()).power(self.arity))
    }

    pub fn apply_real(&self, x: f64) -> Result<f64, OpError> {
        self.op.evaluate_reals(&vec![x; self.arity])
    }
}

pub fn diagonal_section(f: &VariadicOp, n: usize) -> Result<DiagonalSection, OpError> {
    if n == 0 {
        return Err(OpError::InvalidParams { family: "diagonal".into(), reason: "arity must be positive".into() });
    }
    if let Some(max) = f.max_arity {
        if n > max {
            return Err(OpError::ArityOverflow { len: n, max });
        }
    }
    Ok(DiagonalSection { op: f.clone(), arity: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Interval;
    use serde_json::json;

    fn op(name: &str) -> VariadicOp {
        builtin(name, &Params::new()).unwrap()
    }

    fn with(name: &str, params: serde_json::Value) -> VariadicOp {
        builtin(name, params.as_object().unwrap()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(op("arith-mean").evaluate_reals(&[1.0, 3.0]).unwrap(), 2.0);
        let first = with("first-projection", json!({"alphabet": ["a", "b", "c"]}));
        assert_eq!(first.evaluate(&Word::syms("abc")).unwrap(), Value::sym("a"));
        let w = op("weighted-pow2").evaluate_reals(&[1.0, 0.0, 0.0]).unwrap();
        assert!((w - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn epsilon_defaults() {
        assert_eq!(op("arith-mean").evaluate(&Word::empty()).unwrap(), Value::Eps);
        assert_eq!(op("sum").evaluate(&Word::empty()).unwrap_err(), OpError::EpsilonUndefined);
        assert_eq!(op("length").evaluate(&Word::empty()).unwrap(), Value::Int(0));
    }

    #[test]
    fn builtin_examples() {
        assert_eq!(op("length").evaluate(&Word::syms("abab")).unwrap(), Value::Int(4));
        assert_eq!(op("sum").evaluate_reals(&[2.0, 3.0, 4.0]).unwrap(), 9.0);
        let last = with("last-projection", json!({"alphabet": ["a", "b", "c"]}));
        assert_eq!(last.evaluate(&Word::syms("abc")).unwrap(), Value::sym("c"));
    }

    #[test]
    fn evaluation_errors() {
        let t = with("first-projection", json!({"alphabet": ["a", "b"]})).to_table(&Alphabet::syms("ab"), 2).unwrap();
        assert_eq!(
            t.evaluate(&Word::syms("aaa")).unwrap_err(),
            OpError::ArityOverflow { len: 3, max: 2 }
        );
        assert!(matches!(t.evaluate(&Word::syms("az")), Err(OpError::OutOfDomain(_))));
        let g = op("geometric-mean");
        assert!(matches!(g.evaluate_reals(&[-1.0, 2.0]), Err(OpError::OutOfDomain(_))));
    }

    #[test]
    fn table_agrees_with_source_bit_exactly() {
        let ab = Alphabet::syms("ab");
        let src = with("max", json!({"alphabet": ["a", "b"]}));
        let t = src.to_table(&ab, 4).unwrap();
        assert!(t.is_table());
        assert!(t.codomain().is_domain());
        for n in 1..=4 {
            for (i, w) in enumerate_words(ab.letters(), n).enumerate() {
                assert_eq!(t.evaluate(&w).unwrap(), t.table(n).unwrap()[i]);
                assert_eq!(t.evaluate(&w).unwrap(), src.evaluate(&w).unwrap());
            }
        }
    }

    #[test]
    fn to_table_refuses_unclosed_codomain() {
        let mean = op("arith-mean");
        let grid = Alphabet::new(vec![Value::Real(0.0), Value::Real(1.0)]).unwrap();
        assert!(matches!(mean.to_table(&grid, 2), Err(OpError::OutOfCodomain { .. })));
    }

    #[test]
    fn right_compose_examples() {
        let mean = op("arith-mean");
        let double: UnaryMap = Arc::new(|v| Ok(Value::Real(2.0 * v.as_real().unwrap())));
        let h = right_compose(&mean, double, Domain::Real(Interval::reals())).unwrap();
        assert_eq!(h.evaluate_reals(&[1.0, 2.0]).unwrap(), 3.0);

        let identity: UnaryMap = Arc::new(|v| Ok(v.clone()));
        let first = with("first-projection", json!({"alphabet": ["a", "b"]}));
        let h = right_compose(&first, identity, first.domain().clone()).unwrap();
        for w in enumerate_words(Alphabet::syms("ab").letters(), 3) {
            assert_eq!(h.evaluate(&w).unwrap(), first.evaluate(&w).unwrap());
        }

        let len = with("length", json!({"alphabet": ["a", "b", "c"]}));
        let swap: UnaryMap = Arc::new(|v| Ok(if *v == Value::sym("a") { Value::sym("b") } else { v.clone() }));
        let h = right_compose(&len, swap, len.domain().clone()).unwrap();
        assert_eq!(h.evaluate(&Word::syms("abc")).unwrap(), Value::Int(3));
    }

    #[test]
    fn right_compose_detects_domain_mismatch() {
        let g = op("geometric-mean");
        let negate: UnaryMap = Arc::new(|v| Ok(Value::Real(-v.as_real().unwrap())));
        let err = right_compose(&g, negate, Domain::Real(Interval::closed(1.0, 2.0).unwrap())).unwrap_err();
        assert!(matches!(err, OpError::DomainMismatch(_)));
    }

    #[test]
    fn left_compose_examples() {
        let mean = op("arith-mean");
        let scale: ArityMap = Arc::new(|n, v| Ok(Value::Real(n as f64 * v.as_real().unwrap())));
        let h = left_compose(&mean, scale, Codomain::External("reals".into()));
        assert_eq!(h.evaluate_reals(&[1.0, 3.0]).unwrap(), 4.0);

        let first = with("first-projection", json!({"alphabet": ["a", "b"]}));
        let id: ArityMap = Arc::new(|_, v| Ok(v.clone()));
        let h = left_compose(&first, id.clone(), first.codomain().clone());
        for w in enumerate_words(Alphabet::syms("ab").letters(), 3) {
            assert_eq!(h.evaluate(&w).unwrap(), first.evaluate(&w).unwrap());
        }
        assert_eq!(left_injectivity(&first.to_table(&Alphabet::syms("ab"), 3).unwrap(), &id, 3).unwrap(), None);
    }

    #[test]
    fn squaring_is_not_injective_on_plus_minus_one() {
        let square = |v: &Value| Ok(Value::Real(v.as_real().unwrap().powi(2)));
        let hit = injective_on(&square, &[Value::Real(-1.0), Value::Real(1.0)]).unwrap();
        assert_eq!(hit, Some((Value::Real(-1.0), Value::Real(1.0), Value::Real(1.0))));
    }

    #[test]
    fn left_injectivity_reports_collision() {
        let t = with("first-projection", json!({"alphabet": ["a", "b"]})).to_table(&Alphabet::syms("ab"), 2).unwrap();
        let collapse: ArityMap = Arc::new(|n, v| Ok(if n == 2 { Value::Int(0) } else { v.clone() }));
        let c = left_injectivity(&t, &collapse, 2).unwrap().unwrap();
        assert_eq!(c.arity, 2);
    }

    #[test]
    fn truncate_constant_examples() {
        let mean = op("arith-mean");
        let g = truncate_constant(&mean, 2, Arc::new(|_| Value::Real(0.0))).unwrap();
        assert_eq!(g.evaluate_reals(&[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(g.evaluate_reals(&[1.0, 2.0]).unwrap(), 1.5);
    }

    #[test]
    fn truncate_constant_checks_codomain() {
        let t = with("first-projection", json!({"alphabet": ["a", "b"]})).to_table(&Alphabet::syms("ab"), 3).unwrap();
        let err = truncate_constant(&t, 1, Arc::new(|_| Value::sym("z"))).unwrap_err();
        assert!(matches!(err, OpError::OutOfCodomain { .. }));
    }

    #[test]
    fn diagonal_section_examples() {
        assert_eq!(diagonal_section(&op("arith-mean"), 3).unwrap().apply_real(5.0).unwrap(), 5.0);
        assert_eq!(diagonal_section(&op("sum"), 3).unwrap().apply_real(2.0).unwrap(), 6.0);
        let first = with("first-projection", json!({"alphabet": ["a", "b"]}));
        assert_eq!(diagonal_section(&first, 4).unwrap().apply(&Value::sym("a")).unwrap(), Value::sym("a"));
    }

    #[test]
    fn weighted_pow2_weights_sum_to_one() {
        let w = op("weighted-pow2");
        for n in 1..=20 {
            let total = w.evaluate_reals(&vec![1.0; n]).unwrap();
            assert!((total - 1.0).abs() < 1e-12, "n = {n}: {total}");
        }
    }

    #[test]
    fn range_in_enumeration_order() {
        let t = with("max", json!({"alphabet": ["a", "b"]})).to_table(&Alphabet::syms("ab"), 2).unwrap();
        assert_eq!(t.range(2).unwrap(), vec![Value::sym("a"), Value::sym("b")]);
    }
}
